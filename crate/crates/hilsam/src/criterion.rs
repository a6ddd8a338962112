//! The constancy checker: deciding whether the radical of a cone ideal is a
//! given linear ideal, the cone criterion (radical and reduced ridge both
//! equal the directrix), normal flatness via Hilbert-Samuel comparison,
//! empirical stratum scans over finite fields, and a combined report that
//! cross-checks all of them.

use crate::cone::{directrix, linear_form_coeffs, ridge, ridge_reduced_as_linear, transplant};
use crate::graded::{graded_membership, hs_generic_point, hs_local_truncated};
use crate::intpoly::Char;
use crate::linalg::Subspace;
use crate::poly::{Poly, Ring};
use crate::polyhedron::prepare;
use crate::scan::scan_variety;
pub use crate::scan::ScanPoint;
use crate::{Error, FieldElement, Result};

/// Tri-state verdict: a failed power search is not a refutation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// Certificate for the question "is the radical of (gens) the linear ideal
/// (forms)?": membership of each generator in the linear ideal, the power
/// exponents found for each form, and a separating point when one refutes
/// the equality.
#[derive(Clone, Debug)]
pub struct RadicalReport {
    pub verdict: Verdict,
    pub gens_in_span: bool,
    pub failing_generator: Option<usize>,
    pub power_exponents: Vec<Option<u32>>,
    pub counterexample: Option<Vec<FieldElement>>,
}

fn eval_poly(f: &Poly, point: &[FieldElement]) -> Result<FieldElement> {
    let field = f.ring().field();
    let mut acc = field.zero();
    for (e, c) in f.terms() {
        let mut t = c.clone();
        for (i, &ei) in e.iter().enumerate() {
            if ei > 0 {
                t = t.mul(&point[i].pow(ei as i64)?);
            }
        }
        acc = acc.add(&t);
    }
    Ok(acc)
}

/// Small-point search for a point of V(gens) where some form does not
/// vanish; any hit refutes radical equality outright.  Only prime fields
/// and small integers over the rationals are tried.
fn search_counterexample(
    ring: &Ring,
    gens: &[Poly],
    forms: &[Poly],
) -> Result<Option<Vec<FieldElement>>> {
    let field = ring.field();
    let candidates: Vec<FieldElement> = match (field.characteristic(), field.arity()) {
        (Char::Zero, 0) => [0i64, 1, -1, 2, -2].iter().map(|&v| field.from_int(v)).collect(),
        (Char::P(p), 0) if p <= 64 => (0..p).map(|v| field.from_int(v as i64)).collect(),
        _ => return Ok(None),
    };
    let n = ring.nvars();
    let mut idx = vec![0usize; n];
    let mut budget = 2_000_000u64;
    loop {
        if budget == 0 {
            return Ok(None);
        }
        budget -= 1;
        let point: Vec<FieldElement> = idx.iter().map(|&i| candidates[i].clone()).collect();
        let mut on_variety = true;
        for g in gens {
            if !eval_poly(g, &point)?.is_zero() {
                on_variety = false;
                break;
            }
        }
        if on_variety {
            for f in forms {
                if !eval_poly(f, &point)?.is_zero() {
                    return Ok(Some(point));
                }
            }
        }
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(None);
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < candidates.len() {
                break;
            }
            idx[i] = 0;
        }
    }
}

/// Decide whether the radical of the homogeneous ideal (gens) equals the
/// linear ideal (forms): every generator must lie in (forms), and some
/// power of each form (up to nmax) must lie in (gens).  Exhausting the
/// power search yields Inconclusive unless a separating point is found.
pub fn radical_equal_linear(
    ring: &Ring,
    gens: &[Poly],
    forms: &[Poly],
    nmax: u32,
) -> Result<RadicalReport> {
    let mut span = Subspace::empty(ring.field().clone(), ring.nvars());
    for f in forms {
        if f.is_zero() || f.total_degree() != Some(1) || f.order() != Some(1) {
            return Err(Error::Domain(
                "the comparison ideal must be generated by linear forms".into(),
            ));
        }
        if !span.insert(linear_form_coeffs(f)) {
            return Err(Error::Domain("the linear forms must be linearly independent".into()));
        }
    }
    for (i, g) in gens.iter().enumerate() {
        if g.is_zero() {
            return Err(Error::Domain(format!("generator {} is zero", i + 1)));
        }
        if !g.is_homogeneous() {
            return Err(Error::Domain(
                "the radical comparison requires homogeneous generators".into(),
            ));
        }
    }
    for (i, g) in gens.iter().enumerate() {
        if !graded_membership(ring, g, forms)? {
            return Ok(RadicalReport {
                verdict: Verdict::Fails,
                gens_in_span: false,
                failing_generator: Some(i),
                power_exponents: vec![None; forms.len()],
                counterexample: None,
            });
        }
    }
    let mut power_exponents = vec![];
    let mut exhausted = false;
    for form in forms {
        let mut found = None;
        let mut pw = form.clone();
        for exp in 1..=nmax {
            if graded_membership(ring, &pw, gens)? {
                found = Some(exp);
                break;
            }
            if exp < nmax {
                pw = pw.mul(form);
            }
        }
        exhausted |= found.is_none();
        power_exponents.push(found);
    }
    if !exhausted {
        return Ok(RadicalReport {
            verdict: Verdict::Holds,
            gens_in_span: true,
            failing_generator: None,
            power_exponents,
            counterexample: None,
        });
    }
    let counterexample = search_counterexample(ring, gens, forms)?;
    Ok(RadicalReport {
        verdict: if counterexample.is_some() { Verdict::Fails } else { Verdict::Inconclusive },
        gens_in_span: true,
        failing_generator: None,
        power_exponents,
        counterexample,
    })
}

/// Outcome of the cone criterion on a homogeneous ideal: the directrix J,
/// the ridge basis (its defining polynomials and their p-power degrees),
/// the ridge reduced to linear forms when root extraction succeeds, and
/// the two sub-verdicts whose conjunction predicts HS constancy.
#[derive(Clone, Debug)]
pub struct CriterionReport {
    pub directrix_forms: Vec<Poly>,
    pub directrix_dim: usize,
    pub ridge_polys: Vec<Poly>,
    pub ridge_qs: Vec<u64>,
    pub ridge_linear: Option<Vec<Poly>>,
    pub i_red: RadicalReport,
    pub ridge_red_matches: Verdict,
    pub predicted: Verdict,
}

/// HS is constant on a cone exactly when both the radical of the ideal and
/// the reduced ridge equal the directrix subspace.
pub fn cone_constancy_criterion(
    ring: &Ring,
    gens: &[Poly],
    nmax: Option<u32>,
) -> Result<CriterionReport> {
    for (i, g) in gens.iter().enumerate() {
        if g.is_zero() {
            return Err(Error::Domain(format!("generator {} is zero", i + 1)));
        }
        if !g.is_homogeneous() {
            return Err(Error::Domain(
                "the cone criterion requires homogeneous generators".into(),
            ));
        }
    }
    let dir = directrix(ring, gens)?;
    let rid = ridge(ring, gens)?;
    let ridge_qs = rid.basis.degrees();
    let nmax = nmax.unwrap_or_else(|| {
        let degs: u32 = gens.iter().map(|g| g.total_degree().unwrap_or(0)).sum();
        degs + ridge_qs.iter().max().copied().unwrap_or(1) as u32
    });
    let i_red = radical_equal_linear(ring, gens, &dir.forms, nmax)?;
    let ridge_polys: Vec<Poly> =
        rid.basis.polys().iter().map(|f| transplant(f, ring)).collect();
    let (ridge_linear, ridge_red_matches) = match ridge_reduced_as_linear(&rid.basis) {
        None => (None, Verdict::Fails),
        Some(forms_t) => {
            let forms: Vec<Poly> = forms_t.iter().map(|f| transplant(f, ring)).collect();
            let mut a = Subspace::empty(ring.field().clone(), ring.nvars());
            for f in &forms {
                a.insert(linear_form_coeffs(f));
            }
            let mut b = Subspace::empty(ring.field().clone(), ring.nvars());
            for f in &dir.forms {
                b.insert(linear_form_coeffs(f));
            }
            let same = a.dim() == b.dim()
                && forms.iter().all(|f| b.contains(&linear_form_coeffs(f)));
            (Some(forms), if same { Verdict::Holds } else { Verdict::Fails })
        }
    };
    let predicted = if i_red.verdict == Verdict::Fails || ridge_red_matches == Verdict::Fails {
        Verdict::Fails
    } else if i_red.verdict == Verdict::Inconclusive {
        Verdict::Inconclusive
    } else {
        Verdict::Holds
    };
    Ok(CriterionReport {
        directrix_forms: dir.forms,
        directrix_dim: dir.dim,
        ridge_polys,
        ridge_qs,
        ridge_linear,
        i_red,
        ridge_red_matches,
        predicted,
    })
}

/// Normal flatness along the coordinate subspace V(yvars), tested by the
/// HS comparison: the origin function iterated #y times must agree with
/// the generic-point function iterated (ambient variable count) times.
pub fn normal_flatness_check(
    ring: &Ring,
    gens: &[Poly],
    yvars: &[usize],
    bound: u32,
) -> Result<bool> {
    let n = ring.nvars();
    let generic = hs_generic_point(ring, gens, yvars, bound)?.iterate(n as u32);
    let all: Vec<Poly> = (0..n).map(|i| ring.var(i)).collect();
    let origin = hs_local_truncated(ring, gens, &all, bound)?.iterate(yvars.len() as u32);
    Ok(origin.agrees_with(&generic))
}

/// Sampled stratum of the origin: the variety's points over small
/// extensions, each labelled by whether its truncated local HS matches the
/// origin's, plus (for cones) the same scan of the ridge cone.
#[derive(Clone, Debug)]
pub struct ScanReport {
    pub p: u64,
    pub max_level: u32,
    pub truncation: u32,
    pub origin_hs: Vec<u64>,
    pub points: Vec<ScanPoint>,
    pub all_in_stratum: bool,
    pub ridge_points: Option<Vec<ScanPoint>>,
    pub strata_coincide: Option<bool>,
}

pub fn stratum_scan(
    ring: &Ring,
    gens: &[Poly],
    max_level: u32,
    boxlim: Option<u64>,
    bound: u32,
) -> Result<ScanReport> {
    let scan = scan_variety(ring, gens, max_level, boxlim, bound)?;
    let p = match ring.field().characteristic() {
        Char::P(p) => p,
        Char::Zero => unreachable!("scan_variety rejects characteristic zero"),
    };
    let homogeneous = gens.iter().all(|g| g.is_homogeneous());
    let (ridge_points, strata_coincide) = if homogeneous {
        let rid = ridge(ring, gens)?;
        let rgens: Vec<Poly> =
            rid.basis.polys().iter().map(|f| transplant(f, ring)).collect();
        let rscan = scan_variety(ring, &rgens, max_level, boxlim, bound)?;
        let stratum: Vec<&ScanPoint> = scan.points.iter().filter(|pt| pt.in_stratum).collect();
        let rstratum: Vec<&ScanPoint> =
            rscan.points.iter().filter(|pt| pt.in_stratum).collect();
        let eq = stratum.len() == rstratum.len()
            && stratum
                .iter()
                .zip(&rstratum)
                .all(|(a, b)| a.level == b.level && a.coords == b.coords);
        (Some(rscan.points), Some(eq))
    } else {
        (None, None)
    };
    Ok(ScanReport {
        p,
        max_level,
        truncation: bound,
        origin_hs: scan.origin_hs,
        points: scan.points,
        all_in_stratum: scan.all_in_stratum,
        ridge_points,
        strata_coincide,
    })
}

#[derive(Clone, Debug)]
pub struct ReportOptions {
    pub scan: bool,
    pub max_level: u32,
    pub boxlim: Option<u64>,
    pub bound: u32,
    pub nmax: Option<u32>,
    pub max_steps: usize,
}

impl Default for ReportOptions {
    fn default() -> ReportOptions {
        ReportOptions {
            scan: false,
            max_level: 2,
            boxlim: None,
            bound: 6,
            nmax: None,
            max_steps: 64,
        }
    }
}

/// Combined report.  For homogeneous input the cone criterion drives the
/// verdict and the scan, flatness check and polyhedron are corroboration;
/// for general input a declared (u, y) split supplies the linear reduction
/// and the flatness check drives the verdict.
#[derive(Clone, Debug)]
pub struct TheoremReport {
    pub homogeneous: bool,
    pub cone: Option<CriterionReport>,
    pub scan: Option<ScanReport>,
    pub split: Option<(Vec<usize>, Vec<usize>)>,
    pub reduction_regular: Option<bool>,
    pub normally_flat: Option<bool>,
    pub polyhedron_empty: Option<bool>,
    pub prepared: Option<bool>,
    pub hs_constant: Verdict,
    pub disagreement: bool,
    pub summary: String,
    pub notes: Vec<String>,
}

/// Does the y-part of the split span exactly the directrix subspace?
fn split_spans_forms(ring: &Ring, yvars: &[usize], forms: &[Poly]) -> bool {
    if yvars.len() != forms.len() {
        return false;
    }
    let mut on_y = vec![false; ring.nvars()];
    for &i in yvars {
        on_y[i] = true;
    }
    forms.iter().all(|f| {
        linear_form_coeffs(f)
            .iter()
            .enumerate()
            .all(|(i, c)| on_y[i] || c.is_zero())
    })
}

/// Derive a (u, y) split from the directrix when its echelon basis consists
/// of coordinate variables.
fn directrix_split(ring: &Ring, forms: &[Poly]) -> Option<(Vec<usize>, Vec<usize>)> {
    let mut yvars = vec![];
    for f in forms {
        let coeffs = linear_form_coeffs(f);
        let nonzero: Vec<usize> = coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, _)| i)
            .collect();
        if nonzero.len() != 1 || !coeffs[nonzero[0]].is_one() {
            return None;
        }
        yvars.push(nonzero[0]);
    }
    yvars.sort_unstable();
    yvars.dedup();
    if yvars.len() != forms.len() {
        return None;
    }
    let uvars: Vec<usize> = (0..ring.nvars()).filter(|i| !yvars.contains(i)).collect();
    Some((uvars, yvars))
}

pub fn theorem_report(
    ring: &Ring,
    gens: &[Poly],
    split: Option<(&[usize], &[usize])>,
    opts: &ReportOptions,
) -> Result<TheoremReport> {
    if gens.is_empty() {
        return Err(Error::Domain("no generators given".into()));
    }
    let homogeneous = gens.iter().all(|g| !g.is_zero() && g.is_homogeneous());
    if homogeneous {
        theorem_report_cone(ring, gens, split, opts)
    } else {
        theorem_report_general(ring, gens, split, opts)
    }
}

fn theorem_report_cone(
    ring: &Ring,
    gens: &[Poly],
    split: Option<(&[usize], &[usize])>,
    opts: &ReportOptions,
) -> Result<TheoremReport> {
    let mut notes = vec![];
    let cone = cone_constancy_criterion(ring, gens, opts.nmax)?;
    let scan = if opts.scan {
        match stratum_scan(ring, gens, opts.max_level, opts.boxlim, opts.bound) {
            Ok(s) => Some(s),
            Err(Error::Unsupported(msg)) => {
                notes.push(format!("stratum scan skipped: {msg}"));
                None
            }
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    let split: Option<(Vec<usize>, Vec<usize>)> = match split {
        Some((u, y)) => Some((u.to_vec(), y.to_vec())),
        None => {
            let s = directrix_split(ring, &cone.directrix_forms);
            if s.is_none() {
                notes.push(
                    "the directrix is not spanned by coordinate variables; \
                     no (u, y) split derived"
                        .into(),
                );
            }
            s
        }
    };
    let mut normally_flat = None;
    let mut polyhedron_empty = None;
    let mut prepared = None;
    let mut split_matches = false;
    if let Some((u, y)) = &split {
        split_matches = split_spans_forms(ring, y, &cone.directrix_forms);
        if !split_matches {
            notes.push(
                "the split's y-part does not span the directrix; \
                 the flatness check is informational only"
                    .into(),
            );
        }
        match normal_flatness_check(ring, gens, y, opts.bound) {
            Ok(flat) => normally_flat = Some(flat),
            Err(Error::Domain(msg)) => {
                notes.push(format!("normal flatness check skipped: {msg}"))
            }
            Err(e) => return Err(e),
        }
        let sys = prepare(ring, gens, u, y, opts.max_steps)?;
        polyhedron_empty = Some(sys.polyhedron.is_empty());
        prepared = Some(sys.prepared);
    }
    let predicted = cone.predicted;
    let reduction_regular = match cone.i_red.verdict {
        Verdict::Holds => Some(true),
        _ => None,
    };
    let mut disagreement = false;
    if let Some(s) = &scan {
        match predicted {
            Verdict::Holds => disagreement |= !s.all_in_stratum,
            Verdict::Fails => disagreement |= s.all_in_stratum,
            Verdict::Inconclusive => {}
        }
    }
    if predicted == Verdict::Holds && prepared == Some(true) && polyhedron_empty == Some(false) {
        disagreement = true;
    }
    if split_matches && cone.i_red.verdict == Verdict::Holds {
        match (predicted, normally_flat) {
            (Verdict::Holds, Some(false)) | (Verdict::Fails, Some(true)) => disagreement = true,
            _ => {}
        }
    }
    let mut summary = match predicted {
        Verdict::Holds => "cone criterion: HS constant predicted".to_string(),
        Verdict::Fails => "cone criterion: HS non-constant predicted".to_string(),
        Verdict::Inconclusive => "cone criterion: inconclusive".to_string(),
    };
    if let Some(s) = &scan {
        if predicted == Verdict::Inconclusive {
            summary.push_str(if s.all_in_stratum {
                ", scan: HS constant on the sample"
            } else {
                ", scan: HS non-constant on the sample"
            });
        } else if disagreement {
            summary.push_str(", scan disagrees");
        } else {
            summary.push_str(", scan agrees");
        }
    }
    Ok(TheoremReport {
        homogeneous: true,
        cone: Some(cone),
        scan,
        split,
        reduction_regular,
        normally_flat,
        polyhedron_empty,
        prepared,
        hs_constant: predicted,
        disagreement,
        summary,
        notes,
    })
}

fn theorem_report_general(
    ring: &Ring,
    gens: &[Poly],
    split: Option<(&[usize], &[usize])>,
    opts: &ReportOptions,
) -> Result<TheoremReport> {
    let mut notes = vec![];
    let Some((u, y)) = split else {
        return Err(Error::Domain(
            "a (u, y) split declaring the linear reduction is required for \
             inhomogeneous input"
                .into(),
        ));
    };
    if opts.scan {
        notes.push("the empirical scan only runs for homogeneous input".into());
    }
    let flat = normal_flatness_check(ring, gens, y, opts.bound)?;
    let sys = prepare(ring, gens, u, y, opts.max_steps)?;
    let polyhedron_empty = sys.polyhedron.is_empty();
    let hs_constant = if flat { Verdict::Holds } else { Verdict::Fails };
    let disagreement = flat && sys.prepared && !polyhedron_empty;
    let summary = format!(
        "reduction regular, {}, HS {}",
        if flat { "normally flat" } else { "not normally flat" },
        if flat { "constant" } else { "non-constant" },
    );
    Ok(TheoremReport {
        homogeneous: false,
        cone: None,
        scan: None,
        split: Some((u.to_vec(), y.to_vec())),
        reduction_regular: Some(true),
        normally_flat: Some(flat),
        polyhedron_empty: Some(polyhedron_empty),
        prepared: Some(sys.prepared),
        hs_constant,
        disagreement,
        summary,
        notes,
    })
}
