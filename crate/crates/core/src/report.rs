//! Evaluating a scenario into CSV tables and a text summary.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use crate::channel::{apply, channel_is_physical, compose_chain, ChannelChain, GaussianChannel, GaussianState};
use crate::eb::{
    choi_ppt_oracle, classify, locate_gain_flip, pia_sandwich_margin, pia_threshold, psa_sandwich_margin,
    psa_threshold, rate_upper_bound, reduce_standard_form, EbVerdict, StandardForm, Threshold, DEFAULT_SCHEDULE,
};
use crate::error::{Error, Result};
use crate::exec::{par_map, Execution};
use crate::linalg::{rel_frobenius, Mat, Vector};
use crate::relay::{collapse_chain, decompose_sandwich, RelayElement, SandwichInput, Witnesses};
use crate::scenario::{Output, Scenario, Segment};
use crate::stations::StationSpec;
use crate::symplectic::symplectic_residual;

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub execution: Execution,
    pub workers: Option<usize>,
    /// Largest acceptable recomposition error.
    pub tol: f64,
    /// Oracle squeezing schedule as `cosh 2r` values.
    pub schedule: Vec<f64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            execution: Execution::default(),
            workers: None,
            tol: 1e-9,
            schedule: DEFAULT_SCHEDULE.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(usize),
    Float(f64),
    Text(String),
    Empty,
}

impl Value {
    fn render(&self) -> String {
        match self {
            Value::Int(i) => i.to_string(),
            // 17 significant digits, enough to re-parse the same double.
            Value::Float(x) => format!("{x:.16e}"),
            Value::Text(s) => s.clone(),
            Value::Empty => String::new(),
        }
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Float(x)
    }
}

impl From<Option<f64>> for Value {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Value::Empty, Value::Float)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: &'static str,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    fn new(name: &'static str, header: &[&'static str]) -> Self {
        Table {
            name,
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Value::render).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub tables: Vec<Table>,
    pub summary: String,
    /// Numerical checks that exceeded the tolerance.
    pub failures: Vec<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    /// Writes `<table>.csv` files and `summary.txt`; returns the paths in
    /// write order.
    pub fn write(&self, dir: &Path) -> io::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut paths = Vec::with_capacity(self.tables.len() + 1);
        for t in &self.tables {
            let path = dir.join(format!("{}.csv", t.name));
            fs::write(&path, t.to_csv())?;
            paths.push(path);
        }
        let path = dir.join("summary.txt");
        fs::write(&path, &self.summary)?;
        paths.push(path);
        Ok(paths)
    }
}

struct DecomposeEval {
    eta: f64,
    err_k: f64,
    err_alpha: f64,
    front_min: f64,
    back_residual: f64,
    front: GaussianChannel,
    back: GaussianChannel,
    witnesses: Option<Witnesses>,
}

struct EbEval {
    eta1: f64,
    eta2: f64,
    gain: Option<f64>,
    eta: f64,
    closed: EbVerdict,
    oracle: EbVerdict,
    standard: StandardForm,
}

struct ThresholdEval {
    station: &'static str,
    eta1: f64,
    eta2: f64,
    closed: Threshold,
    located: Threshold,
}

#[derive(Default)]
struct PointEval {
    compose: Option<(GaussianChannel, Option<GaussianState>)>,
    decompose: Option<DecomposeEval>,
    eb: Option<EbEval>,
    thresholds: Option<ThresholdEval>,
    bound: Option<(f64, f64)>,
}

fn losses(chain: &[Segment]) -> Vec<f64> {
    chain.iter().filter_map(Segment::loss_eta).collect()
}

fn stations_of(chain: &[Segment]) -> Vec<&Segment> {
    chain.iter().filter(|s| s.loss_eta().is_none()).collect()
}

fn evaluate(sc: &Scenario, outputs: &[Output], value: Option<f64>, opts: &RunOptions) -> Result<PointEval> {
    let segments = sc.chain_at(value)?;
    let links = sc.build_chain(value)?;
    let total = compose_chain(&ChannelChain::new(links)?);
    let mut ev = PointEval::default();
    let relay = |sc: &Scenario| -> Result<Vec<RelayElement>> { sc.relay_elements(value) };

    if outputs.contains(&Output::Compose) {
        let state = match &sc.state {
            Some(st) => Some(apply(&total, &st.build(sc.modes)?)?),
            None => None,
        };
        ev.compose = Some((total.clone(), state));
    }
    if outputs.contains(&Output::Decompose) {
        let elements = relay(sc)?;
        let collapsed = collapse_chain(&elements)?;
        let recomposed = collapsed.recompose();
        let witnesses = if elements.len() == 3 {
            match (&elements[0], &elements[1], &elements[2]) {
                (RelayElement::Loss(e1), RelayElement::Station(st), RelayElement::Loss(e2)) => {
                    decompose_sandwich(&SandwichInput::new(*e1, *e2, st.clone())?)?.witnesses
                }
                _ => None,
            }
        } else {
            None
        };
        let back_residual = if collapsed.back.alpha().iter().all(|&x| x == 0.0) {
            symplectic_residual(collapsed.back.k())
        } else {
            f64::INFINITY
        };
        ev.decompose = Some(DecomposeEval {
            eta: collapsed.eta,
            err_k: rel_frobenius(recomposed.k(), total.k()),
            err_alpha: rel_frobenius(recomposed.alpha(), total.alpha()),
            front_min: channel_is_physical(&collapsed.front).min_eigenvalue,
            back_residual,
            front: collapsed.front,
            back: collapsed.back,
            witnesses,
        });
    }
    if outputs.contains(&Output::Eb) {
        relay(sc)?;
        let ls = losses(&segments);
        let gain = stations_of(&segments).first().and_then(|s| match s {
            Segment::Station(st) => st.gain(),
            Segment::Channel(_) => None,
        });
        // Displacements do not affect entanglement breaking.
        let centred = GaussianChannel::from_trusted(total.k().clone(), Vector::zeros(2 * sc.modes), total.alpha().clone());
        ev.eb = Some(EbEval {
            eta1: ls[0],
            eta2: *ls.last().expect("relay chain has losses"),
            gain,
            eta: ls.iter().product(),
            closed: classify(&centred)?,
            oracle: choi_ppt_oracle(&centred, &opts.schedule)?,
            standard: reduce_standard_form(&centred)?,
        });
    }
    if outputs.contains(&Output::Thresholds) {
        relay(sc)?;
        let ls = losses(&segments);
        let st = stations_of(&segments);
        if st.len() != 1 {
            return Err(Error::Unsupported("thresholds need exactly one psa or pia station between two losses".into()));
        }
        let (e1, e2) = (ls[0], ls[1]);
        ev.thresholds = Some(match st[0] {
            Segment::Station(StationSpec::Psa { .. }) => ThresholdEval {
                station: "psa",
                eta1: e1,
                eta2: e2,
                closed: psa_threshold(e1, e2)?,
                located: locate_gain_flip(|g| psa_sandwich_margin(e1, e2, g))?,
            },
            Segment::Station(StationSpec::Pia { .. }) => ThresholdEval {
                station: "pia",
                eta1: e1,
                eta2: e2,
                closed: pia_threshold(e1)?,
                located: locate_gain_flip(|g| pia_sandwich_margin(e1, e2, g))?,
            },
            other => {
                return Err(Error::Unsupported(format!(
                    "thresholds are defined for psa or pia stations, not {}",
                    other.kind_name()
                )))
            }
        });
    }
    if outputs.contains(&Output::Bound) {
        let eta: f64 = losses(&segments).iter().product();
        ev.bound = Some((eta, rate_upper_bound(eta)?));
    }
    Ok(ev)
}

fn push_matrix(table: &mut Table, prefix: &[Value], field: &str, m: &Mat) {
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let mut row = prefix.to_vec();
            row.extend([Value::Text(field.to_string()), Value::Int(i), Value::Int(j), Value::Float(m[(i, j)])]);
            table.rows.push(row);
        }
    }
}

fn push_vector(table: &mut Table, prefix: &[Value], field: &str, v: &Vector) {
    for i in 0..v.len() {
        let mut row = prefix.to_vec();
        row.extend([Value::Text(field.to_string()), Value::Int(i), Value::Int(0), Value::Float(v[i])]);
        table.rows.push(row);
    }
}

fn fmt_matrix(m: &Mat) -> String {
    let rows: Vec<String> = (0..m.nrows())
        .map(|i| {
            let cells: Vec<String> = (0..m.ncols()).map(|j| format!("{:.6}", m[(i, j)])).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

fn fmt_threshold(t: Threshold) -> String {
    match t {
        Threshold::Finite(v) => format!("{v:.10}"),
        Threshold::Divergent => "diverges".into(),
    }
}

fn threshold_value(t: Threshold) -> Value {
    Value::Float(t.value())
}

/// Runs the requested analyses over every sweep point.
pub fn run(sc: &Scenario, outputs: &[Output], opts: &RunOptions) -> Result<Report> {
    sc.validate()?;
    let values: Vec<Option<f64>> = match &sc.sweep {
        Some(sw) => sw.values().into_iter().map(Some).collect(),
        None => vec![None],
    };
    let evals = par_map(&values, opts.execution, opts.workers, |v| evaluate(sc, outputs, *v, opts));
    let mut points = Vec::with_capacity(evals.len());
    for (i, (res, v)) in evals.into_iter().zip(&values).enumerate() {
        let context = match (v, &sc.sweep) {
            (Some(v), Some(sw)) => format!("scenario {:?}, point {} ({} = {v})", sc.name, i + 1, sw.path()),
            _ => format!("scenario {:?}", sc.name),
        };
        points.push(res.map_err(|e| e.at(context))?);
    }

    let param = |i: usize| -> Value { values[i].into() };
    let param_label = |i: usize| -> String {
        match (&sc.sweep, values[i]) {
            (Some(sw), Some(v)) => format!("{} = {v:.6}", sw.path()),
            _ => "point 1".into(),
        }
    };
    let mut tables = Vec::new();
    let mut failures = Vec::new();
    let mut summary = String::new();
    let _ = writeln!(summary, "scenario: {}", sc.name);
    match &sc.sweep {
        Some(sw) => {
            let _ = writeln!(summary, "points: {} ({} from {} to {})", sw.steps, sw.path(), sw.min, sw.max);
        }
        None => {
            let _ = writeln!(summary, "points: 1");
        }
    }

    for out in outputs {
        let _ = writeln!(summary, "\n[{}]", out.name());
        match out {
            Output::Compose => {
                let mut t = Table::new("compose", &["point", "param", "field", "row", "col", "value"]);
                for (i, p) in points.iter().enumerate() {
                    let (ch, state) = p.compose.as_ref().expect("evaluated");
                    let prefix = [Value::Int(i + 1), param(i)];
                    push_matrix(&mut t, &prefix, "k", ch.k());
                    push_vector(&mut t, &prefix, "m", ch.m());
                    push_matrix(&mut t, &prefix, "alpha", ch.alpha());
                    if let Some(st) = state {
                        push_matrix(&mut t, &prefix, "gamma_out", st.gamma());
                        push_vector(&mut t, &prefix, "d_out", st.displacement());
                    }
                }
                tables.push(t);
                if let Some(p) = points.first() {
                    let (ch, state) = p.compose.as_ref().expect("evaluated");
                    let _ = writeln!(summary, "total channel at {}:", param_label(0));
                    let _ = writeln!(summary, "  K = {}", fmt_matrix(ch.k()));
                    let _ = writeln!(summary, "  alpha = {}", fmt_matrix(ch.alpha()));
                    if let Some(st) = state {
                        let _ = writeln!(summary, "  output gamma = {}", fmt_matrix(st.gamma()));
                    }
                }
            }
            Output::Decompose => {
                let mut t = Table::new(
                    "decompose",
                    &["point", "param", "eta_total", "error_k", "error_alpha", "front_min_eig", "back_symplectic_residual"],
                );
                let mut mats = Table::new("decompose_matrices", &["point", "param", "field", "row", "col", "value"]);
                let mut worst = 0.0f64;
                for (i, p) in points.iter().enumerate() {
                    let d = p.decompose.as_ref().expect("evaluated");
                    t.rows.push(vec![
                        Value::Int(i + 1),
                        param(i),
                        d.eta.into(),
                        d.err_k.into(),
                        d.err_alpha.into(),
                        d.front_min.into(),
                        d.back_residual.into(),
                    ]);
                    let prefix = [Value::Int(i + 1), param(i)];
                    push_matrix(&mut mats, &prefix, "front_k", d.front.k());
                    push_matrix(&mut mats, &prefix, "front_alpha", d.front.alpha());
                    push_matrix(&mut mats, &prefix, "back_k", d.back.k());
                    if let Some(w) = &d.witnesses {
                        push_matrix(&mut mats, &prefix, "gamma", &w.gamma);
                        push_matrix(&mut mats, &prefix, "gamma_prime", &w.gamma_prime);
                        push_matrix(&mut mats, &prefix, "transform", w.transform.matrix());
                    }
                    let err = d.err_k.max(d.err_alpha);
                    worst = worst.max(err);
                    if !(err <= opts.tol) {
                        failures.push(format!("{}: recomposition error {err:.3e} exceeds {:.1e}", param_label(i), opts.tol));
                    }
                    if d.front_min < -crate::policy::PSD_FLOOR {
                        failures.push(format!("{}: front channel unphysical ({:.3e})", param_label(i), d.front_min));
                    }
                    if !(d.back_residual <= opts.tol) {
                        failures.push(format!("{}: back channel not unitary", param_label(i)));
                    }
                }
                tables.push(t);
                tables.push(mats);
                let verdict = if worst <= opts.tol { "ok" } else { "FAILED" };
                let _ = writeln!(summary, "max recomposition error {worst:.3e} (tol {:.1e}): {verdict}", opts.tol);
                if let Some(d) = points.first().and_then(|p| p.decompose.as_ref()) {
                    let _ = writeln!(summary, "front/loss/back at {}:", param_label(0));
                    let _ = writeln!(summary, "  front K = {}, alpha = {}", fmt_matrix(d.front.k()), fmt_matrix(d.front.alpha()));
                    let _ = writeln!(summary, "  loss eta = {:.10}", d.eta);
                    let _ = writeln!(summary, "  back K = {}", fmt_matrix(d.back.k()));
                    if let Some(w) = &d.witnesses {
                        let _ = writeln!(summary, "  mixing p = {:.10}, gamma' = {}", w.mixing, fmt_matrix(&w.gamma_prime));
                    }
                }
            }
            Output::Eb => {
                let mut t = Table::new(
                    "eb",
                    &[
                        "point",
                        "param",
                        "eta1",
                        "eta2",
                        "gain",
                        "margin_closed_form",
                        "margin_oracle_min_nu",
                        "eb_flag",
                        "eta_s",
                        "noise_s",
                    ],
                );
                for (i, p) in points.iter().enumerate() {
                    let e = p.eb.as_ref().expect("evaluated");
                    t.rows.push(vec![
                        Value::Int(i + 1),
                        param(i),
                        e.eta1.into(),
                        e.eta2.into(),
                        e.gain.into(),
                        e.closed.margin.into(),
                        e.oracle.margin.into(),
                        Value::Int(usize::from(e.closed.eb)),
                        e.standard.eta_s.into(),
                        e.standard.noise.into(),
                    ]);
                    let mut flag = if e.closed.eb { "EB" } else { "not EB" }.to_string();
                    if e.closed.boundary {
                        flag.push_str(" (boundary)");
                    }
                    if e.closed.eb != e.oracle.eb && e.closed.margin.abs() >= 1e-6 {
                        flag.push_str(" [oracle disagrees]");
                    }
                    let _ = writeln!(
                        summary,
                        "{}: eta = {:.10}, eta_s = {:.10}, N_s = {:.10}, margin = {:+.3e}, {flag}",
                        param_label(i),
                        e.eta,
                        e.standard.eta_s,
                        e.standard.noise,
                        e.closed.margin,
                    );
                }
                tables.push(t);
            }
            Output::Thresholds => {
                let mut t = Table::new(
                    "thresholds",
                    &["point", "param", "station", "eta1", "eta2", "closed_form", "bisection", "difference"],
                );
                for (i, p) in points.iter().enumerate() {
                    let th = p.thresholds.as_ref().expect("evaluated");
                    let diff = match (th.closed, th.located) {
                        (Threshold::Finite(a), Threshold::Finite(b)) => Value::Float(b - a),
                        _ => Value::Empty,
                    };
                    t.rows.push(vec![
                        Value::Int(i + 1),
                        param(i),
                        Value::Text(th.station.into()),
                        th.eta1.into(),
                        th.eta2.into(),
                        threshold_value(th.closed),
                        threshold_value(th.located),
                        diff,
                    ]);
                }
                tables.push(t);
                if let Some(th) = points.first().and_then(|p| p.thresholds.as_ref()) {
                    let _ = writeln!(
                        summary,
                        "{} threshold at eta1 = {}, eta2 = {}: closed form {}, bisection {}",
                        th.station,
                        th.eta1,
                        th.eta2,
                        fmt_threshold(th.closed),
                        fmt_threshold(th.located)
                    );
                }
            }
            Output::Bound => {
                let mut t = Table::new("bound", &["point", "param", "eta_total", "r_ub_bits_per_mode"]);
                for (i, p) in points.iter().enumerate() {
                    let (eta, r) = p.bound.expect("evaluated");
                    t.rows.push(vec![Value::Int(i + 1), param(i), eta.into(), r.into()]);
                }
                tables.push(t);
                let mut seen = Vec::new();
                for p in &points {
                    let (eta, r) = p.bound.expect("evaluated");
                    if !seen.contains(&eta.to_bits()) {
                        seen.push(eta.to_bits());
                        let _ = writeln!(summary, "eta = {eta:.10}: R_UB = {r:.10} bits/mode");
                    }
                }
            }
        }
    }
    if !failures.is_empty() {
        let _ = writeln!(summary, "\nnumerical checks failed:");
        for f in &failures {
            let _ = writeln!(summary, "  {f}");
        }
    }
    Ok(Report {
        tables,
        summary,
        failures,
    })
}
