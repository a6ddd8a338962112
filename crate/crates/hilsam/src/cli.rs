//! Batch front end: the line-oriented ideal-file format, session
//! pretty-printing, and the command dispatcher emitting deterministic JSON
//! or plain-text reports.

use num_rational::BigRational;
use serde_json::{json, Map, Value};

use crate::cone::{directrix, hs_stratum_derivative_ideal, ridge};
use crate::criterion::{
    cone_constancy_criterion, normal_flatness_check, stratum_scan, theorem_report,
    CriterionReport, RadicalReport, ReportOptions, ScanPoint, ScanReport, Verdict,
};
use crate::graded::{hs_generic_point, hs_local_truncated, nu_star_graded};
use crate::poly::{Poly, Ring};
use crate::polyhedron::{
    blowup_chart_transform, prepare, projected_polyhedron, BlowupChart, OrthantPolyhedron,
};
use crate::{Char, Error, Field, FieldElement, Result};

/// A parsed ideal file: the ambient ring, the generators, and the optional
/// (u, y) coordinate split.
#[derive(Clone, Debug)]
pub struct Session {
    pub ring: Ring,
    pub gens: Vec<Poly>,
    pub split: Option<(Vec<usize>, Vec<usize>)>,
}

/// Whitespace-separated tokens with 1-based column positions; `;` always
/// forms its own token.
fn tokens_with_cols(line: &str) -> Vec<(String, usize)> {
    let mut out = vec![];
    let mut cur = String::new();
    let mut start = 0;
    for (i, ch) in line.chars().enumerate() {
        if ch.is_whitespace() || ch == ';' {
            if !cur.is_empty() {
                out.push((std::mem::take(&mut cur), start));
            }
            if ch == ';' {
                out.push((";".into(), i + 1));
            }
        } else {
            if cur.is_empty() {
                start = i + 1;
            }
            cur.push(ch);
        }
    }
    if !cur.is_empty() {
        out.push((cur, start));
    }
    out
}

fn perr(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, col, msg: msg.into() }
}

fn parse_field_directive(toks: &[(String, usize)], line: usize, head_col: usize) -> Result<Field> {
    let Some((kind, kcol)) = toks.first() else {
        return Err(perr(line, head_col, "expected a field descriptor after `field`"));
    };
    match kind.as_str() {
        "Q" => {
            if toks.len() > 1 {
                return Err(perr(line, toks[1].1, "unexpected trailing input after `field Q`"));
            }
            Ok(Field::rationals())
        }
        "Fp" => {
            let Some((ptext, pcol)) = toks.get(1) else {
                return Err(perr(line, *kcol, "expected a prime after `Fp`"));
            };
            let p: u64 = ptext
                .parse()
                .map_err(|_| perr(line, *pcol, format!("invalid prime `{ptext}`")))?;
            if toks.len() > 2 {
                return Err(perr(line, toks[2].1, "unexpected trailing input after the prime"));
            }
            Field::finite(p).map_err(|e| perr(line, *pcol, e.to_string()))
        }
        "Frac" => {
            let Some((base, bcol)) = toks.get(1) else {
                return Err(perr(line, *kcol, "expected `Q` or a prime after `Frac`"));
            };
            let ch = if base == "Q" {
                Char::Zero
            } else {
                let p: u64 = base
                    .parse()
                    .map_err(|_| perr(line, *bcol, format!("invalid base field `{base}`")))?;
                Char::P(p)
            };
            match toks.get(2) {
                Some((t, _)) if t == ";" => {}
                _ => return Err(perr(line, *bcol, "expected `;` before the parameter names")),
            }
            let params = &toks[3..];
            if params.is_empty() {
                return Err(perr(line, toks[2].1, "expected parameter names after `;`"));
            }
            let names: Vec<&str> = params.iter().map(|(t, _)| t.as_str()).collect();
            Field::fraction_field(ch, &names).map_err(|e| perr(line, params[0].1, e.to_string()))
        }
        other => Err(perr(line, *kcol, format!("unknown field descriptor `{other}`"))),
    }
}

fn parse_split_directive(
    ring: &Ring,
    toks: &[(String, usize)],
    line: usize,
    head_col: usize,
) -> Result<(Vec<usize>, Vec<usize>)> {
    match toks.first() {
        Some((t, _)) if t == "u:" => {}
        _ => return Err(perr(line, head_col, "expected `u:` after `split`")),
    }
    let Some(semi) = toks.iter().position(|(t, _)| t == ";") else {
        return Err(perr(line, head_col, "expected `;` between the u and y lists"));
    };
    match toks.get(semi + 1) {
        Some((t, _)) if t == "y:" => {}
        _ => return Err(perr(line, toks[semi].1, "expected `y:` after `;`")),
    }
    let mut seen = vec![false; ring.nvars()];
    let mut u = vec![];
    let mut y = vec![];
    for (section, out) in [(&toks[1..semi], &mut u), (&toks[semi + 2..], &mut y)] {
        for (name, col) in section.iter() {
            let Some(i) = ring.var_index(name) else {
                return Err(perr(line, *col, format!("unknown variable `{name}` in split")));
            };
            if seen[i] {
                return Err(perr(
                    line,
                    *col,
                    format!("variable `{name}` appears twice in the split"),
                ));
            }
            seen[i] = true;
            out.push(i);
        }
    }
    if !seen.iter().all(|&s| s) {
        return Err(perr(line, head_col, "the split must cover all variables"));
    }
    Ok((u, y))
}

pub fn parse_ideal_file(text: &str) -> Result<Session> {
    let mut field: Option<Field> = None;
    let mut ring: Option<Ring> = None;
    let mut split: Option<(Vec<usize>, Vec<usize>)> = None;
    let mut gens: Vec<Poly> = vec![];
    let mut nlines = 0;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        nlines = lineno;
        let line = raw.trim_end();
        if line.trim_start().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let toks = tokens_with_cols(line);
        let (head, hcol) = (toks[0].0.as_str(), toks[0].1);
        match head {
            "field" => {
                if field.is_some() {
                    return Err(perr(lineno, hcol, "field re-declared"));
                }
                field = Some(parse_field_directive(&toks[1..], lineno, hcol)?);
            }
            "vars" => {
                let Some(f) = &field else {
                    return Err(perr(lineno, hcol, "the field must be declared before `vars`"));
                };
                if ring.is_some() {
                    return Err(perr(lineno, hcol, "variables re-declared"));
                }
                if toks.len() == 1 {
                    return Err(perr(lineno, hcol, "expected variable names after `vars`"));
                }
                let mut names: Vec<&str> = vec![];
                for (t, c) in &toks[1..] {
                    if t == ";" {
                        return Err(perr(lineno, *c, "unexpected `;` in the variable list"));
                    }
                    if names.contains(&t.as_str()) {
                        return Err(perr(lineno, *c, format!("duplicate variable `{t}`")));
                    }
                    names.push(t);
                }
                ring = Some(
                    Ring::new(f.clone(), &names)
                        .map_err(|e| perr(lineno, hcol, e.to_string()))?,
                );
            }
            "split" => {
                let Some(r) = &ring else {
                    return Err(perr(lineno, hcol, "variables must be declared before `split`"));
                };
                if split.is_some() {
                    return Err(perr(lineno, hcol, "split re-declared"));
                }
                split = Some(parse_split_directive(r, &toks[1..], lineno, hcol)?);
            }
            "gen" => {
                let Some(r) = &ring else {
                    return Err(perr(lineno, hcol, "variables must be declared before `gen`"));
                };
                let Some((_, ecol)) = toks.get(1) else {
                    return Err(perr(lineno, hcol, "expected a generator expression after `gen`"));
                };
                let col0 = ecol - 1;
                let expr: String = line.chars().skip(col0).collect();
                let g = r.parse_expr(&expr, lineno, col0)?;
                if g.is_zero() {
                    return Err(perr(lineno, *ecol, format!("generator {} is zero", gens.len() + 1)));
                }
                gens.push(g);
            }
            other => return Err(perr(lineno, hcol, format!("unknown directive `{other}`"))),
        }
    }
    let endline = nlines.max(1);
    if field.is_none() {
        return Err(perr(endline, 1, "no field declared"));
    }
    let Some(ring) = ring else {
        return Err(perr(endline, 1, "no variables declared"));
    };
    if gens.is_empty() {
        return Err(perr(endline, 1, "no generators declared"));
    }
    Ok(Session { ring, gens, split })
}

/// Canonical text form of a session; parsing it back reproduces the
/// session exactly.
pub fn pretty_print(session: &Session) -> String {
    let f = session.ring.field();
    let mut out = String::new();
    let field_line = match (f.characteristic(), f.arity()) {
        (Char::Zero, 0) => "field Q".to_string(),
        (Char::P(p), 0) => format!("field Fp {p}"),
        (ch, _) => {
            let base = match ch {
                Char::Zero => "Q".to_string(),
                Char::P(p) => p.to_string(),
            };
            let names: Vec<String> = f.params().iter().map(|p| p.display_name()).collect();
            format!("field Frac {base} ; {}", names.join(" "))
        }
    };
    out.push_str(&field_line);
    out.push('\n');
    out.push_str(&format!("vars {}\n", session.ring.vars().join(" ")));
    if let Some((u, y)) = &session.split {
        out.push_str(&format!(
            "split u: {} ; y: {}\n",
            names_of(&session.ring, u).join(" "),
            names_of(&session.ring, y).join(" "),
        ));
    }
    for g in &session.gens {
        out.push_str(&format!("gen {g}\n"));
    }
    out
}

fn names_of(ring: &Ring, idxs: &[usize]) -> Vec<String> {
    idxs.iter().map(|&i| ring.vars()[i].clone()).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Hs,
    NuStar,
    Directrix,
    Ridge,
    StratumIdeal,
    Polyhedron,
    Prepare,
    Blowup,
    Criterion,
    NormalFlat,
    Scan,
    Report,
}

impl Command {
    pub fn parse(name: &str) -> Result<Command> {
        Ok(match name {
            "hs" => Command::Hs,
            "nu-star" => Command::NuStar,
            "directrix" => Command::Directrix,
            "ridge" => Command::Ridge,
            "stratum-ideal" => Command::StratumIdeal,
            "polyhedron" => Command::Polyhedron,
            "prepare" => Command::Prepare,
            "blowup" => Command::Blowup,
            "criterion" => Command::Criterion,
            "normal-flat" => Command::NormalFlat,
            "scan" => Command::Scan,
            "report" => Command::Report,
            other => return Err(Error::Domain(format!("unknown command `{other}`"))),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Command::Hs => "hs",
            Command::NuStar => "nu-star",
            Command::Directrix => "directrix",
            Command::Ridge => "ridge",
            Command::StratumIdeal => "stratum-ideal",
            Command::Polyhedron => "polyhedron",
            Command::Prepare => "prepare",
            Command::Blowup => "blowup",
            Command::Criterion => "criterion",
            Command::NormalFlat => "normal-flat",
            Command::Scan => "scan",
            Command::Report => "report",
        }
    }
}

pub fn parse_chart(text: &str) -> Result<BlowupChart> {
    let bad = || Error::Domain(format!("invalid chart `{text}`; use e.g. `u1` or `y2`"));
    let mut chars = text.chars();
    let kind = chars.next().ok_or_else(bad)?;
    let idx: usize = chars.as_str().parse().map_err(|_| bad())?;
    if idx == 0 {
        return Err(bad());
    }
    match kind {
        'u' => Ok(BlowupChart::U(idx - 1)),
        'y' => Ok(BlowupChart::Y(idx - 1)),
        _ => Err(bad()),
    }
}

fn chart_name(chart: BlowupChart) -> String {
    match chart {
        BlowupChart::U(i) => format!("u{}", i + 1),
        BlowupChart::Y(i) => format!("y{}", i + 1),
    }
}

#[derive(Clone, Debug)]
pub struct Options {
    pub trunc: u32,
    pub nmax: Option<u32>,
    pub steps: usize,
    pub ext: u32,
    pub boxlim: Option<u64>,
    pub chart: Option<BlowupChart>,
    pub json: bool,
}

impl Default for Options {
    fn default() -> Options {
        Options {
            trunc: 6,
            nmax: None,
            steps: 64,
            ext: 2,
            boxlim: None,
            chart: None,
            json: true,
        }
    }
}

fn rat_str(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn point_str(p: &[BigRational]) -> String {
    p.iter().map(rat_str).collect::<Vec<_>>().join(",")
}

fn fe_str(c: &FieldElement) -> String {
    match c.as_rational() {
        Some(r) => rat_str(r),
        None => c.to_string(),
    }
}

fn poly_strings(polys: &[Poly]) -> Vec<String> {
    polys.iter().map(|g| g.to_string()).collect()
}

fn polyhedron_json(ph: &OrthantPolyhedron) -> Value {
    json!({
        "empty": ph.is_empty(),
        "vertices": ph.vertices().iter().map(|v| point_str(v)).collect::<Vec<_>>(),
        "delta": ph.delta().map(|d| rat_str(&d)),
        "first_face": ph.first_face().iter().map(|v| point_str(v)).collect::<Vec<_>>(),
    })
}

fn radical_json(rep: &RadicalReport) -> Value {
    json!({
        "verdict": rep.verdict.as_str(),
        "gens_in_span": rep.gens_in_span,
        "failing_generator": rep.failing_generator.map(|i| i + 1),
        "power_exponents": rep.power_exponents,
        "counterexample": rep.counterexample.as_ref().map(|pt| {
            pt.iter().map(fe_str).collect::<Vec<_>>().join(",")
        }),
    })
}

/// Human-readable reason the ridge is not a reduced linear subspace: the
/// first basis coefficient with no q-th root in the base field.
fn ridge_witness(rep: &CriterionReport) -> Option<String> {
    if rep.ridge_linear.is_some() {
        return None;
    }
    for (f, q) in rep.ridge_polys.iter().zip(&rep.ridge_qs) {
        for (_, c) in f.terms() {
            if c.qth_power_root(*q).is_none() {
                let root = match q {
                    2 => "square root".to_string(),
                    3 => "cube root".to_string(),
                    q => format!("{q}th root"),
                };
                return Some(format!("{c} admits no {root}"));
            }
        }
    }
    Some("the ridge does not reduce to linear forms over the base field".into())
}

fn criterion_json(rep: &CriterionReport) -> Value {
    json!({
        "directrix": {
            "forms": poly_strings(&rep.directrix_forms),
            "dim": rep.directrix_dim,
        },
        "ridge": {
            "basis": poly_strings(&rep.ridge_polys),
            "degrees": rep.ridge_qs,
            "linear": rep.ridge_linear.as_ref().map(|fs| poly_strings(fs)),
            "witness": ridge_witness(rep),
        },
        "i_red": radical_json(&rep.i_red),
        "ridge_red_matches": rep.ridge_red_matches.as_str(),
        "predicted": rep.predicted.as_str(),
        "predicted_constant": verdict_bool(rep.predicted),
    })
}

fn verdict_bool(v: Verdict) -> Value {
    match v {
        Verdict::Holds => json!(true),
        Verdict::Fails => json!(false),
        Verdict::Inconclusive => Value::Null,
    }
}

fn points_json(points: &[ScanPoint]) -> Value {
    Value::Array(
        points
            .iter()
            .map(|pt| {
                json!({
                    "level": pt.level,
                    "coords": pt.coords.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","),
                    "in_stratum": pt.in_stratum,
                })
            })
            .collect(),
    )
}

fn scan_json(rep: &ScanReport) -> Value {
    json!({
        "p": rep.p,
        "max_level": rep.max_level,
        "truncation": rep.truncation,
        "origin_hs": rep.origin_hs,
        "points": points_json(&rep.points),
        "all_in_stratum": rep.all_in_stratum,
        "ridge_points": rep.ridge_points.as_ref().map(|pts| points_json(pts)),
        "strata_coincide": rep.strata_coincide,
    })
}

fn require_split<'a>(session: &'a Session, cmd: &str) -> Result<(&'a [usize], &'a [usize])> {
    session
        .split
        .as_ref()
        .map(|(u, y)| (u.as_slice(), y.as_slice()))
        .ok_or_else(|| Error::Domain(format!("a (u, y) split is required for `{cmd}`")))
}

fn command_payload(
    session: &Session,
    cmd: Command,
    opts: &Options,
) -> Result<(Map<String, Value>, i32)> {
    let ring = &session.ring;
    let gens = &session.gens;
    let mut m = Map::new();
    let mut exit = 0;
    match cmd {
        Command::Hs => {
            let all: Vec<Poly> = (0..ring.nvars()).map(|i| ring.var(i)).collect();
            let origin = hs_local_truncated(ring, gens, &all, opts.trunc)?;
            m.insert("origin".into(), json!(origin.values));
            if let Some((_, y)) = &session.split {
                let generic = hs_generic_point(ring, gens, y, opts.trunc)?;
                m.insert("generic".into(), json!(generic.values));
            }
            m.insert("truncation".into(), json!(opts.trunc));
        }
        Command::NuStar => {
            let nu = nu_star_graded(ring, gens, opts.trunc)?;
            m.insert("nu_star".into(), json!(nu));
        }
        Command::Directrix => {
            let dir = directrix(ring, gens)?;
            m.insert("forms".into(), json!(poly_strings(&dir.forms)));
            m.insert("dim".into(), json!(dir.dim));
        }
        Command::Ridge => {
            let rid = ridge(ring, gens)?;
            m.insert("basis".into(), json!(poly_strings(&rid.basis.polys())));
            m.insert("degrees".into(), json!(rid.basis.degrees()));
            m.insert("stabilizer".into(), json!(poly_strings(&rid.stabilizer)));
        }
        Command::StratumIdeal => {
            let gens2 = hs_stratum_derivative_ideal(ring, gens)?;
            m.insert("generators".into(), json!(poly_strings(&gens2)));
        }
        Command::Polyhedron => {
            let (u, y) = require_split(session, "polyhedron")?;
            let ph = projected_polyhedron(ring, gens, u, y)?;
            let Value::Object(body) = polyhedron_json(&ph) else { unreachable!() };
            m.extend(body);
        }
        Command::Prepare => {
            let (u, y) = require_split(session, "prepare")?;
            let sys = prepare(ring, gens, u, y, opts.steps)?;
            m.insert("prepared".into(), json!(sys.prepared));
            m.insert("generators".into(), json!(poly_strings(&sys.gens)));
            m.insert(
                "steps".into(),
                json!(sys
                    .steps
                    .iter()
                    .map(|s| {
                        json!({
                            "vertex": point_str(&s.vertex),
                            "lambda": s.lambda.iter().map(fe_str).collect::<Vec<_>>(),
                        })
                    })
                    .collect::<Vec<_>>()),
            );
            m.insert("polyhedron".into(), polyhedron_json(&sys.polyhedron));
        }
        Command::Blowup => {
            let (u, y) = require_split(session, "blowup")?;
            let chart = opts
                .chart
                .ok_or_else(|| Error::Domain("a --chart argument (e.g. `u1`) is required for `blowup`".into()))?;
            let sys = prepare(ring, gens, u, y, opts.steps)?;
            let rep = blowup_chart_transform(&sys, chart)?;
            m.insert("chart".into(), json!(chart_name(rep.chart)));
            m.insert("generators".into(), json!(poly_strings(&rep.gens)));
            m.insert("u".into(), json!(names_of(ring, &rep.u)));
            m.insert("y".into(), json!(names_of(ring, &rep.y)));
            m.insert("polyhedron".into(), polyhedron_json(&rep.polyhedron));
            m.insert("delta_old".into(), json!(rep.delta_old.as_ref().map(rat_str)));
            m.insert("min_first".into(), json!(rep.min_first.as_ref().map(rat_str)));
            m.insert(
                "affine_min_first".into(),
                json!(rep.affine_min_first.as_ref().map(rat_str)),
            );
            m.insert("law_holds".into(), json!(rep.law_holds));
            m.insert("permissible".into(), json!(rep.permissible));
            m.insert("division_exact".into(), json!(rep.division_exact));
        }
        Command::Criterion => {
            let rep = cone_constancy_criterion(ring, gens, opts.nmax)?;
            let Value::Object(body) = criterion_json(&rep) else { unreachable!() };
            m.extend(body);
            if rep.predicted == Verdict::Inconclusive {
                exit = 2;
            }
        }
        Command::NormalFlat => {
            let (_, y) = require_split(session, "normal-flat")?;
            let flat = normal_flatness_check(ring, gens, y, opts.trunc)?;
            let all: Vec<Poly> = (0..ring.nvars()).map(|i| ring.var(i)).collect();
            let origin = hs_local_truncated(ring, gens, &all, opts.trunc)?;
            let generic = hs_generic_point(ring, gens, y, opts.trunc)?;
            m.insert("normally_flat".into(), json!(flat));
            m.insert("origin".into(), json!(origin.values));
            m.insert("generic".into(), json!(generic.values));
        }
        Command::Scan => {
            let rep = stratum_scan(ring, gens, opts.ext, opts.boxlim, opts.trunc)?;
            let Value::Object(body) = scan_json(&rep) else { unreachable!() };
            m.extend(body);
        }
        Command::Report => {
            let ropts = ReportOptions {
                scan: true,
                max_level: opts.ext,
                boxlim: opts.boxlim,
                bound: opts.trunc,
                nmax: opts.nmax,
                max_steps: opts.steps,
            };
            let split_ref = session.split.as_ref().map(|(u, y)| (u.as_slice(), y.as_slice()));
            let rep = theorem_report(ring, gens, split_ref, &ropts)?;
            m.insert("homogeneous".into(), json!(rep.homogeneous));
            m.insert("summary".into(), json!(rep.summary));
            m.insert("hs_constant".into(), json!(rep.hs_constant.as_str()));
            m.insert("disagreement".into(), json!(rep.disagreement));
            m.insert("cone".into(), rep.cone.as_ref().map(criterion_json).unwrap_or(Value::Null));
            m.insert("scan".into(), rep.scan.as_ref().map(scan_json).unwrap_or(Value::Null));
            m.insert(
                "split".into(),
                rep.split
                    .as_ref()
                    .map(|(u, y)| {
                        json!({"u": names_of(ring, u), "y": names_of(ring, y)})
                    })
                    .unwrap_or(Value::Null),
            );
            m.insert("reduction_regular".into(), json!(rep.reduction_regular));
            m.insert("normally_flat".into(), json!(rep.normally_flat));
            m.insert("polyhedron_empty".into(), json!(rep.polyhedron_empty));
            m.insert("prepared".into(), json!(rep.prepared));
            m.insert("notes".into(), json!(rep.notes));
            if rep.disagreement {
                exit = 1;
            } else if rep.hs_constant == Verdict::Inconclusive {
                exit = 2;
            }
        }
    }
    Ok((m, exit))
}

fn envelope(session: &Session, cmd: Command, opts: &Options) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("schema".into(), json!(1));
    m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    m.insert("command".into(), json!(cmd.name()));
    m.insert(
        "session".into(),
        json!({
            "field": session.ring.field().to_string(),
            "vars": session.ring.vars(),
            "split": session.split.as_ref().map(|(u, y)| {
                json!({"u": names_of(&session.ring, u), "y": names_of(&session.ring, y)})
            }),
            "generators": poly_strings(&session.gens),
        }),
    );
    m.insert(
        "options".into(),
        json!({
            "D": opts.trunc,
            "nmax": opts.nmax,
            "steps": opts.steps,
            "ext": opts.ext,
            "box": opts.boxlim,
            "chart": opts.chart.map(chart_name),
        }),
    );
    m
}

fn write_text(out: &mut String, indent: usize, key: &str, v: &Value) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(m) => {
            out.push_str(&format!("{pad}{key}:\n"));
            for (k2, v2) in m {
                write_text(out, indent + 1, k2, v2);
            }
        }
        Value::Array(a) if a.iter().any(|x| x.is_object() || x.is_array()) => {
            out.push_str(&format!("{pad}{key}:\n"));
            for item in a {
                match item {
                    Value::Object(m) => {
                        out.push_str(&format!("{pad}  -\n"));
                        for (k2, v2) in m {
                            write_text(out, indent + 2, k2, v2);
                        }
                    }
                    other => out.push_str(&format!("{pad}  - {other}\n")),
                }
            }
        }
        other => out.push_str(&format!("{pad}{key}: {other}\n")),
    }
}

/// Run one command against a session; returns the rendered report and the
/// process exit code (0 ok, 2 inconclusive, 1 hard disagreement).
pub fn run_command(session: &Session, cmd: Command, opts: &Options) -> Result<(String, i32)> {
    let (payload, exit) = command_payload(session, cmd, opts)?;
    let mut root = envelope(session, cmd, opts);
    root.extend(payload);
    let rendered = if opts.json {
        let mut s = serde_json::to_string_pretty(&Value::Object(root)).expect("report is valid JSON");
        s.push('\n');
        s
    } else {
        let mut s = String::new();
        for (k, v) in &root {
            write_text(&mut s, 0, k, v);
        }
        s
    };
    Ok((rendered, exit))
}

#[cfg(test)]
mod tests {
    use super::*;

    const EX_A: &str = "field Q\nvars u1 u2 y1\nsplit u: u1 u2 ; y: y1\ngen y1^2 - 2*u1^2*y1 + u1^4 - u2^5\n";
    const EX_B: &str = "field Q\nvars x1 x2 x3\nsplit u: x3 ; y: x1 x2\ngen x1^2 + x2*x3^2\ngen x2^2\n";
    const EX_C: &str = "field Frac 2 ; t\nvars X Y\ngen X^2 + t*Y^2\n";

    #[test]
    fn test_parse_basic_sessions() {
        let a = parse_ideal_file(EX_A).unwrap();
        assert_eq!(a.ring.vars(), &["u1", "u2", "y1"]);
        assert_eq!(a.split, Some((vec![0, 1], vec![2])));
        assert_eq!(a.gens.len(), 1);

        let b = parse_ideal_file(EX_B).unwrap();
        assert_eq!(b.gens.len(), 2);

        let c = parse_ideal_file(EX_C).unwrap();
        assert_eq!(c.ring.field().to_string(), "F2(t)");
        assert_eq!(c.split, None);
    }

    #[test]
    fn test_parse_comments_and_blanks() {
        let text = "# a comment\n\nfield Q\n  \nvars x y\n# another\ngen x*y\n";
        let s = parse_ideal_file(text).unwrap();
        assert_eq!(s.gens.len(), 1);
    }

    #[test]
    fn test_parse_duplicate_variable() {
        let err = parse_ideal_file("field Q\nvars x x\ngen x\n").unwrap_err();
        match err {
            Error::Parse { line, col, msg } => {
                assert_eq!(line, 2);
                assert_eq!(col, 8);
                assert!(msg.starts_with("duplicate variable"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn test_parse_golden_errors() {
        let cases: &[(&str, &str)] = &[
            ("vars x\ngen x\n", "the field must be declared before `vars`"),
            ("field Q\nfield Q\nvars x\ngen x\n", "field re-declared"),
            ("field Z\nvars x\ngen x\n", "unknown field descriptor `Z`"),
            ("field Fp\nvars x\ngen x\n", "expected a prime after `Fp`"),
            ("field Fp 4\nvars x\ngen x\n", "4 is not prime"),
            ("field Frac 2\nvars x\ngen x\n", "expected `;` before the parameter names"),
            ("field Frac 2 ;\nvars x\ngen x\n", "expected parameter names after `;`"),
            ("field Q\nvars x y\nsplit u: x ; y: x\ngen x\n", "variable `x` appears twice in the split"),
            ("field Q\nvars x y\nsplit u: x ; y: z\ngen x\n", "unknown variable `z` in split"),
            ("field Q\nvars x y\nsplit u: x ; y:\ngen x\n", "the split must cover all variables"),
            ("field Q\nvars x y\nsplit y: x ; u: y\ngen x\n", "expected `u:` after `split`"),
            ("field Q\nvars x\ngen y\n", "unknown identifier `y`"),
            ("field Q\nvars x\ngen x - x\n", "generator 1 is zero"),
            ("field Q\nvars x\n", "no generators declared"),
            ("field Q\ngen x\n", "variables must be declared before `gen`"),
            ("bogus\n", "unknown directive `bogus`"),
            ("", "no field declared"),
        ];
        for (text, expected) in cases {
            let err = parse_ideal_file(text).unwrap_err();
            let shown = err.to_string();
            assert!(
                shown.contains(expected),
                "input {text:?}: expected {expected:?} in {shown:?}"
            );
        }
    }

    #[test]
    fn test_round_trip_sessions() {
        for text in [EX_A, EX_B, EX_C] {
            let s1 = parse_ideal_file(text).unwrap();
            let printed = pretty_print(&s1);
            let s2 = parse_ideal_file(&printed).unwrap();
            assert_eq!(s1.ring.vars(), s2.ring.vars());
            assert_eq!(s1.ring.field().to_string(), s2.ring.field().to_string());
            assert_eq!(s1.split, s2.split);
            assert_eq!(s1.gens, s2.gens);
            // printing is idempotent
            assert_eq!(printed, pretty_print(&s2));
        }
    }

    fn run_json(text: &str, cmd: Command, opts: &Options) -> (Value, i32) {
        let session = parse_ideal_file(text).unwrap();
        let (rendered, exit) = run_command(&session, cmd, opts).unwrap();
        (serde_json::from_str(&rendered).unwrap(), exit)
    }

    #[test]
    fn test_polyhedron_command_on_quadric() {
        let (v, exit) = run_json(EX_A, Command::Polyhedron, &Options::default());
        assert_eq!(exit, 0);
        assert_eq!(v["schema"], json!(1));
        assert_eq!(v["vertices"], json!(["0/1,5/2", "2/1,0/1"]));
        assert_eq!(v["delta"], json!("2/1"));
        assert_eq!(v["empty"], json!(false));
    }

    #[test]
    fn test_hs_command_mixed_example() {
        let (v, exit) = run_json(EX_B, Command::Hs, &Options::default());
        assert_eq!(exit, 0);
        assert_eq!(v["origin"], json!([1, 3, 4, 4, 4, 4, 4]));
        assert_eq!(v["generic"], json!([1, 1, 1, 1, 0, 0, 0]));
    }

    #[test]
    fn test_criterion_command_inseparable() {
        let (v, exit) = run_json(EX_C, Command::Criterion, &Options::default());
        assert_eq!(exit, 0);
        assert_eq!(v["predicted_constant"], json!(false));
        assert_eq!(v["ridge"]["witness"], json!("t admits no square root"));
        assert_eq!(v["ridge"]["basis"], json!(["X^2 + t*Y^2"]));
    }

    #[test]
    fn test_criterion_command_inconclusive_exit() {
        let text = "field Q\nvars x y\ngen x^2 + y^2\n";
        let (v, exit) = run_json(text, Command::Criterion, &Options::default());
        assert_eq!(exit, 2);
        assert_eq!(v["predicted"], json!("inconclusive"));
        assert_eq!(v["predicted_constant"], Value::Null);
    }

    #[test]
    fn test_report_command_mixed_example() {
        let (v, exit) = run_json(EX_B, Command::Report, &Options::default());
        assert_eq!(exit, 0);
        assert_eq!(
            v["summary"],
            json!("reduction regular, not normally flat, HS non-constant")
        );
        assert_eq!(v["polyhedron_empty"], json!(false));
        assert_eq!(v["prepared"], json!(true));
        assert_eq!(v["disagreement"], json!(false));
    }

    #[test]
    fn test_prepare_command_records_step() {
        let (v, exit) = run_json(EX_A, Command::Prepare, &Options::default());
        assert_eq!(exit, 0);
        assert_eq!(v["prepared"], json!(true));
        assert_eq!(v["generators"], json!(["-u2^5 + y1^2"]));
        assert_eq!(v["steps"][0]["vertex"], json!("2/1,0/1"));
        assert_eq!(v["steps"][0]["lambda"], json!(["1/1"]));
        assert_eq!(v["polyhedron"]["vertices"], json!(["0/1,5/2"]));
    }

    #[test]
    fn test_blowup_command_u_chart() {
        let opts = Options { chart: Some(BlowupChart::U(0)), ..Options::default() };
        let (v, exit) = run_json(EX_A, Command::Blowup, &opts);
        assert_eq!(exit, 0);
        assert_eq!(v["chart"], json!("u1"));
        assert_eq!(v["law_holds"], json!(true));
        assert_eq!(v["permissible"], json!(true));
        assert_eq!(v["division_exact"], json!(true));
        assert_eq!(v["delta_old"], json!("5/2"));
        assert_eq!(v["min_first"], json!("3/2"));
        assert_eq!(v["affine_min_first"], json!("3/2"));
    }

    #[test]
    fn test_scan_command_over_f3() {
        let text = "field Fp 3\nvars x y\ngen x*y\n";
        let (v, exit) = run_json(text, Command::Scan, &Options { ext: 1, ..Options::default() });
        assert_eq!(exit, 0);
        assert_eq!(v["p"], json!(3));
        assert_eq!(v["all_in_stratum"], json!(false));
        assert_eq!(v["strata_coincide"], json!(true));
        let pts = v["points"].as_array().unwrap();
        assert!(pts.iter().any(|p| p["coords"] == json!("0,0") && p["in_stratum"] == json!(true)));
    }

    #[test]
    fn test_reports_deterministic() {
        for (text, cmd) in [
            (EX_A, Command::Prepare),
            (EX_B, Command::Report),
            (EX_C, Command::Criterion),
        ] {
            let session = parse_ideal_file(text).unwrap();
            let a = run_command(&session, cmd, &Options::default()).unwrap();
            let b = run_command(&session, cmd, &Options::default()).unwrap();
            assert_eq!(a.0, b.0);
        }
    }

    #[test]
    fn test_text_mode_renders() {
        let session = parse_ideal_file(EX_B).unwrap();
        let opts = Options { json: false, ..Options::default() };
        let (text, _) = run_command(&session, Command::Hs, &opts).unwrap();
        assert!(text.contains("origin: [1,3,4,4,4,4,4]"));
        assert!(text.contains("command: \"hs\""));
    }

    #[test]
    fn test_nu_star_and_directrix_commands() {
        let text = "field Q\nvars x y z\ngen x^2\ngen y^2\n";
        let (v, _) = run_json(text, Command::NuStar, &Options::default());
        assert_eq!(v["nu_star"], json!([2, 2]));
        let (v, _) = run_json(text, Command::Directrix, &Options::default());
        assert_eq!(v["forms"], json!(["x", "y"]));
        assert_eq!(v["dim"], json!(2));
    }

    #[test]
    fn test_ridge_command_inseparable_names() {
        let (v, _) = run_json(EX_C, Command::Ridge, &Options::default());
        assert_eq!(v["basis"], json!(["S^2 + t*T^2"]));
        assert_eq!(v["degrees"], json!([2]));
    }

    #[test]
    fn test_commands_requiring_split_error_without_one() {
        let text = "field Q\nvars x y\ngen x*y\n";
        let session = parse_ideal_file(text).unwrap();
        for cmd in [Command::Polyhedron, Command::Prepare, Command::NormalFlat] {
            let err = run_command(&session, cmd, &Options::default()).unwrap_err();
            assert!(err.to_string().contains("split is required"));
        }
    }

    #[test]
    fn test_parse_chart_forms() {
        assert!(matches!(parse_chart("u1"), Ok(BlowupChart::U(0))));
        assert!(matches!(parse_chart("y2"), Ok(BlowupChart::Y(1))));
        assert!(parse_chart("z1").is_err());
        assert!(parse_chart("u0").is_err());
        assert!(parse_chart("u").is_err());
    }
}
