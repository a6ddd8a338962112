//! Python bindings: a `Session` wraps a parsed ideal file and runs the same
//! commands as the command-line tool, returning reports as Python objects.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use hilsam::cli::{self, Command, Options};

fn to_py_err(e: hilsam::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A parsed ideal file: base field, variables, an optional (u, y) split and
/// the list of generators.
#[pyclass(module = "hilsam_py")]
pub struct Session {
    inner: cli::Session,
}

#[pymethods]
impl Session {
    /// Parse the ideal-file text (`field ...` / `vars ...` / `gen ...`).
    #[new]
    fn new(text: &str) -> PyResult<Session> {
        let inner = cli::parse_ideal_file(text).map_err(to_py_err)?;
        Ok(Session { inner })
    }

    /// Parse an ideal file from disk.
    #[staticmethod]
    fn from_path(path: std::path::PathBuf) -> PyResult<Session> {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| PyValueError::new_err(format!("cannot read {}: {e}", path.display())))?;
        Session::new(&text)
    }

    #[getter]
    fn field(&self) -> String {
        self.inner.ring.field().to_string()
    }

    #[getter]
    fn variables(&self) -> Vec<String> {
        self.inner.ring.vars().to_vec()
    }

    #[getter]
    fn generators(&self) -> Vec<String> {
        self.inner.gens.iter().map(|g| g.to_string()).collect()
    }

    /// The declared (u, y) split as two name lists, or None.
    #[getter]
    fn split(&self) -> Option<(Vec<String>, Vec<String>)> {
        self.inner.split.as_ref().map(|(u, y)| {
            let names =
                |idxs: &[usize]| idxs.iter().map(|&i| self.inner.ring.vars()[i].clone()).collect();
            (names(u), names(y))
        })
    }

    /// Canonical ideal-file text; parsing it again reproduces this session.
    fn pretty(&self) -> String {
        cli::pretty_print(&self.inner)
    }

    /// Run a command (`hs`, `nu-star`, `directrix`, `ridge`, `stratum-ideal`,
    /// `polyhedron`, `prepare`, `blowup`, `criterion`, `normal-flat`, `scan`,
    /// `report`) and return `(report, exit_code)`. The report is a dict, or
    /// the plain-text rendering when `text=True`.
    #[pyo3(signature = (command, *, trunc=6, nmax=None, steps=64, ext=2, boxlim=None, chart=None, text=false))]
    #[allow(clippy::too_many_arguments)]
    fn run(
        &self,
        py: Python<'_>,
        command: &str,
        trunc: u32,
        nmax: Option<u32>,
        steps: usize,
        ext: u32,
        boxlim: Option<u64>,
        chart: Option<&str>,
        text: bool,
    ) -> PyResult<(PyObject, i32)> {
        let cmd = Command::parse(command).map_err(to_py_err)?;
        let chart = chart.map(cli::parse_chart).transpose().map_err(to_py_err)?;
        let opts = Options { trunc, nmax, steps, ext, boxlim, chart, json: !text };
        let (report, code) = cli::run_command(&self.inner, cmd, &opts).map_err(to_py_err)?;
        let obj = if text {
            report.into_py(py)
        } else {
            py.import_bound("json")?.call_method1("loads", (report,))?.into_py(py)
        };
        Ok((obj, code))
    }

    fn __repr__(&self) -> String {
        format!(
            "Session(field={}, vars=[{}], {} generator{})",
            self.inner.ring.field(),
            self.inner.ring.vars().join(","),
            self.inner.gens.len(),
            if self.inner.gens.len() == 1 { "" } else { "s" }
        )
    }
}

#[pymodule]
fn hilsam_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Session>()?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use pyo3::types::PyDict;

    const EX_B: &str = "field Q\nvars x1 x2 x3\nsplit u: x3 ; y: x1 x2\n\
                        gen x1^2 + x2*x3^2\ngen x2^2\n";
    const EX_C: &str = "field Frac 2 ; t\nvars X Y\ngen X^2 + t*Y^2\n";

    fn run_default<'py>(
        py: Python<'py>,
        s: &Session,
        cmd: &str,
    ) -> (Bound<'py, PyDict>, i32) {
        let (obj, code) = s.run(py, cmd, 6, None, 64, 2, None, None, false).unwrap();
        (obj.bind(py).downcast::<PyDict>().unwrap().clone(), code)
    }

    #[test]
    fn session_getters_and_repr() {
        let s = Session::new(EX_B).unwrap();
        assert_eq!(s.field(), "Q");
        assert_eq!(s.variables(), vec!["x1", "x2", "x3"]);
        assert_eq!(s.split(), Some((vec!["x3".into()], vec!["x1".into(), "x2".into()])));
        assert_eq!(s.__repr__(), "Session(field=Q, vars=[x1,x2,x3], 2 generators)");
        let reparsed = Session::new(&s.pretty()).unwrap();
        assert_eq!(reparsed.generators(), s.generators());
    }

    #[test]
    fn parse_errors_become_value_errors() {
        Python::with_gil(|py| {
            let err = match Session::new("field Q\nvars x x\ngen x") {
                Err(e) => e,
                Ok(_) => panic!("duplicate variable must be rejected"),
            };
            assert!(err.is_instance_of::<PyValueError>(py));
            assert!(err.to_string().contains("duplicate variable"));
        });
    }

    #[test]
    fn hs_report_roundtrips_through_python_json() {
        Python::with_gil(|py| {
            let s = Session::new(EX_B).unwrap();
            let (dict, code) = run_default(py, &s, "hs");
            assert_eq!(code, 0);
            let origin: Vec<u64> =
                dict.get_item("origin").unwrap().unwrap().extract().unwrap();
            assert_eq!(origin, vec![1, 3, 4, 4, 4, 4, 4]);
            let generic: Vec<u64> =
                dict.get_item("generic").unwrap().unwrap().extract().unwrap();
            assert_eq!(generic, vec![1, 1, 1, 1, 0, 0, 0]);
        });
    }

    #[test]
    fn criterion_reports_the_missing_root() {
        Python::with_gil(|py| {
            let s = Session::new(EX_C).unwrap();
            let (dict, code) = run_default(py, &s, "criterion");
            assert_eq!(code, 0);
            let predicted: bool =
                dict.get_item("predicted_constant").unwrap().unwrap().extract().unwrap();
            assert!(!predicted);
            let ridge = dict.get_item("ridge").unwrap().unwrap();
            let witness: String = ridge
                .downcast::<PyDict>()
                .unwrap()
                .get_item("witness")
                .unwrap()
                .unwrap()
                .extract()
                .unwrap();
            assert_eq!(witness, "t admits no square root");
        });
    }

    #[test]
    fn text_mode_returns_a_string() {
        Python::with_gil(|py| {
            let s = Session::new(EX_B).unwrap();
            let (obj, code) = s.run(py, "hs", 6, None, 64, 2, None, None, true).unwrap();
            assert_eq!(code, 0);
            let text: String = obj.extract(py).unwrap();
            assert!(text.contains("origin: [1,3,4,4,4,4,4]"));
        });
    }

    #[test]
    fn report_summary_matches_the_cli() {
        Python::with_gil(|py| {
            let s = Session::new(EX_B).unwrap();
            let (dict, code) = run_default(py, &s, "report");
            assert_eq!(code, 0);
            let summary: String =
                dict.get_item("summary").unwrap().unwrap().extract().unwrap();
            assert_eq!(summary, "reduction regular, not normally flat, HS non-constant");
        });
    }

    #[test]
    fn options_are_forwarded() {
        Python::with_gil(|py| {
            let s = Session::new(EX_B).unwrap();
            let (obj, _) = s.run(py, "hs", 4, None, 64, 2, None, None, false).unwrap();
            let dict = obj.bind(py).downcast::<PyDict>().unwrap().clone();
            let origin: Vec<u64> =
                dict.get_item("origin").unwrap().unwrap().extract().unwrap();
            assert_eq!(origin, vec![1, 3, 4, 4, 4]);
        });
    }

    #[test]
    fn unknown_command_is_rejected() {
        Python::with_gil(|py| {
            let s = Session::new(EX_B).unwrap();
            let err = s.run(py, "bogus", 6, None, 64, 2, None, None, false).unwrap_err();
            assert!(err.to_string().contains("unknown command `bogus`"));
        });
    }
}
