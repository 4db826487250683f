//! Scenario files.
//!
//! ```text
//! # PSA between two lossy segments, gain swept
//! name = psa-sandwich
//! ordering = xxpp
//! modes = 1
//! outputs = decompose, eb, thresholds, bound
//!
//! [sweep]
//! parameter = segment.2.gain
//! min = 1
//! max = 5
//! steps = 81
//!
//! [segment]
//! kind = loss
//! eta = 0.5
//!
//! [segment]
//! kind = psa
//! gain = 2
//!
//! [segment]
//! kind = loss
//! eta = 0.5
//! ```
//!
//! Segments are listed in the order the signal meets them. A generic
//! segment uses `kind = channel` with `k`, `alpha` and optional `m` given as
//! row-major bracketed lists. An optional `[state]` block (`gamma`, `d`)
//! supplies an input state for the `compose` output.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::channel::{GaussianChannel, GaussianState};
use crate::error::{Error, ParseError, ParseErrors, Result};
use crate::linalg::{from_row_major, Vector};
use crate::policy::MAX_MODES;
use crate::relay::RelayElement;
use crate::stations::{StationKind, StationSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Output {
    Compose,
    Decompose,
    Eb,
    Thresholds,
    Bound,
}

impl Output {
    pub const ALL: [Output; 5] = [Output::Compose, Output::Decompose, Output::Eb, Output::Thresholds, Output::Bound];

    pub fn name(self) -> &'static str {
        match self {
            Output::Compose => "compose",
            Output::Decompose => "decompose",
            Output::Eb => "eb",
            Output::Thresholds => "thresholds",
            Output::Bound => "bound",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|o| o.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ChannelTag {
    Channel,
}

/// Explicit `(K, m, α)` in row-major order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawChannel {
    kind: ChannelTag,
    pub k: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<Vec<f64>>,
    pub alpha: Vec<f64>,
}

impl RawChannel {
    pub fn new(k: Vec<f64>, m: Option<Vec<f64>>, alpha: Vec<f64>) -> Self {
        RawChannel {
            kind: ChannelTag::Channel,
            k,
            m,
            alpha,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Segment {
    Station(StationSpec),
    Channel(RawChannel),
}

impl Segment {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Segment::Station(s) => s.kind().name(),
            Segment::Channel(_) => "channel",
        }
    }

    pub fn loss_eta(&self) -> Option<f64> {
        match self {
            Segment::Station(StationSpec::Loss { eta }) => Some(*eta),
            _ => None,
        }
    }

    pub fn build(&self, modes: usize) -> Result<GaussianChannel> {
        match self {
            Segment::Station(s) => s.build(modes),
            Segment::Channel(raw) => {
                let n2 = 2 * modes;
                let k = from_row_major(n2, n2, &raw.k)?;
                let alpha = from_row_major(n2, n2, &raw.alpha)?;
                let m = match &raw.m {
                    Some(m) if m.len() != n2 => {
                        return Err(Error::Dimension(format!("m needs {n2} entries, found {}", m.len())))
                    }
                    Some(m) => Vector::from_column_slice(m),
                    None => Vector::zeros(n2),
                };
                GaussianChannel::new(k, m, alpha)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    /// 1-based index into the chain.
    pub segment: usize,
    pub key: String,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        crate::selftest::linspace(self.min, self.max, self.steps)
    }

    pub fn path(&self) -> String {
        format!("segment.{}.{}", self.segment, self.key)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSpec {
    pub gamma: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<Vec<f64>>,
}

impl StateSpec {
    pub fn build(&self, modes: usize) -> Result<GaussianState> {
        let n2 = 2 * modes;
        let gamma = from_row_major(n2, n2, &self.gamma)?;
        let d = match &self.d {
            Some(d) if d.len() != n2 => return Err(Error::Dimension(format!("d needs {n2} entries, found {}", d.len()))),
            Some(d) => Vector::from_column_slice(d),
            None => Vector::zeros(n2),
        };
        GaussianState::new(gamma, d)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    #[serde(default = "one")]
    pub modes: usize,
    pub chain: Vec<Segment>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
    #[serde(default = "default_outputs")]
    pub outputs: Vec<Output>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<StateSpec>,
}

fn one() -> usize {
    1
}

fn default_outputs() -> Vec<Output> {
    vec![Output::Compose]
}

/// Where a validation problem sits in the source text.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Loc {
    Top(&'static str),
    Segment(usize),
    SegmentKey(usize, String),
    Sweep(&'static str),
    State(&'static str),
}

impl Scenario {
    /// Number of evaluation points.
    pub fn points(&self) -> usize {
        self.sweep.as_ref().map_or(1, |s| s.steps)
    }

    /// The chain with the sweep parameter set to `value`.
    pub fn chain_at(&self, value: Option<f64>) -> Result<Vec<Segment>> {
        let mut chain = self.chain.clone();
        if let (Some(sw), Some(v)) = (&self.sweep, value) {
            let seg = chain
                .get_mut(sw.segment - 1)
                .ok_or_else(|| Error::InvalidChain(format!("sweep names missing segment {}", sw.segment)))?;
            match seg {
                Segment::Station(s) => {
                    *s = s
                        .with(&sw.key, v)
                        .ok_or_else(|| Error::InvalidChain(format!("{} has no parameter {}", s.kind().name(), sw.key)))?;
                }
                Segment::Channel(_) => return Err(Error::InvalidChain("generic channels cannot be swept".into())),
            }
        }
        Ok(chain)
    }

    pub fn build_chain(&self, value: Option<f64>) -> Result<Vec<GaussianChannel>> {
        self.chain_at(value)?.iter().map(|s| s.build(self.modes)).collect()
    }

    /// The chain as alternating loss/station elements, if it has that shape.
    pub fn relay_elements(&self, value: Option<f64>) -> Result<Vec<RelayElement>> {
        let chain = self.chain_at(value)?;
        let mut out = Vec::with_capacity(chain.len());
        for (i, seg) in chain.iter().enumerate() {
            let want_loss = i % 2 == 0;
            match (want_loss, seg.loss_eta()) {
                (true, Some(eta)) => out.push(RelayElement::Loss(eta)),
                (false, None) => out.push(RelayElement::Station(seg.build(self.modes)?)),
                (true, None) => {
                    return Err(Error::InvalidChain(format!(
                        "segment {} ({}) must be a loss segment",
                        i + 1,
                        seg.kind_name()
                    )))
                }
                (false, Some(_)) => {
                    return Err(Error::InvalidChain(format!("segment {} must be a station, not a loss", i + 1)))
                }
            }
        }
        if out.len() < 3 || out.len() % 2 == 0 {
            return Err(Error::InvalidChain(
                "decomposition needs loss, station, loss, ... ending in a loss".into(),
            ));
        }
        Ok(out)
    }

    fn problems(&self) -> Vec<(Loc, String)> {
        let mut out = Vec::new();
        if self.name.trim().is_empty() {
            out.push((Loc::Top("name"), "name must not be empty".into()));
        }
        if self.modes == 0 || self.modes > MAX_MODES {
            out.push((Loc::Top("modes"), Error::ModeCount(self.modes).to_string()));
            return out;
        }
        if self.chain.is_empty() {
            out.push((Loc::Top("name"), "scenario has no [segment] blocks".into()));
        }
        for (i, seg) in self.chain.iter().enumerate() {
            if let Err(e) = seg.build(self.modes) {
                out.push((seg_loc(i, seg, &e), e.to_string()));
            }
        }
        if let Some(sw) = &self.sweep {
            if sw.steps == 0 {
                out.push((Loc::Sweep("steps"), "steps must be at least 1".into()));
            }
            if !(sw.min.is_finite() && sw.max.is_finite()) || sw.min > sw.max {
                out.push((Loc::Sweep("min"), format!("sweep range [{}, {}] is empty", sw.min, sw.max)));
            }
            match self.chain.get(sw.segment.wrapping_sub(1)) {
                None => out.push((
                    Loc::Sweep("parameter"),
                    format!("segment {} does not exist (chain has {})", sw.segment, self.chain.len()),
                )),
                Some(Segment::Channel(_)) => {
                    out.push((Loc::Sweep("parameter"), "generic channels cannot be swept".into()))
                }
                Some(Segment::Station(s)) => {
                    if s.get(&sw.key).is_none() {
                        out.push((
                            Loc::Sweep("parameter"),
                            format!(
                                "{} has no parameter {:?} (expected one of {})",
                                s.kind().name(),
                                sw.key,
                                s.kind().keys().join(", ")
                            ),
                        ));
                    } else {
                        for (field, v) in [("min", sw.min), ("max", sw.max)] {
                            let built = s.with(&sw.key, v).map(|s| s.build(self.modes));
                            if let Some(Err(e)) = built {
                                out.push((Loc::Sweep(field), format!("sweep {field}: {e}")));
                            }
                        }
                    }
                }
            }
        }
        let needs_relay = self
            .outputs
            .iter()
            .any(|o| matches!(o, Output::Decompose | Output::Eb | Output::Thresholds));
        if needs_relay && out.is_empty() {
            if let Err(e) = self.relay_elements(None) {
                out.push((Loc::Top("outputs"), e.to_string()));
            }
        }
        if let Some(st) = &self.state {
            if let Err(e) = st.build(self.modes) {
                out.push((Loc::State("gamma"), e.to_string()));
            }
        }
        out
    }

    /// Checks the scenario without source positions.
    pub fn validate(&self) -> Result<()> {
        let problems = self.problems();
        if problems.is_empty() {
            return Ok(());
        }
        Err(Error::Parse(ParseErrors(
            problems
                .into_iter()
                .map(|(_, message)| ParseError { line: 0, column: 0, message })
                .collect(),
        )))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let sc: Scenario = serde_json::from_str(text).map_err(|e| {
            Error::Parse(ParseErrors(vec![ParseError {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            }]))
        })?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "name = {}", self.name);
        let _ = writeln!(s, "ordering = xxpp");
        let _ = writeln!(s, "modes = {}", self.modes);
        let outs: Vec<&str> = self.outputs.iter().map(|o| o.name()).collect();
        let _ = writeln!(s, "outputs = {}", outs.join(", "));
        if let Some(sw) = &self.sweep {
            let _ = writeln!(s, "\n[sweep]");
            let _ = writeln!(s, "parameter = {}", sw.path());
            let _ = writeln!(s, "min = {:?}", sw.min);
            let _ = writeln!(s, "max = {:?}", sw.max);
            let _ = writeln!(s, "steps = {}", sw.steps);
        }
        for seg in &self.chain {
            let _ = writeln!(s, "\n[segment]");
            let _ = writeln!(s, "kind = {}", seg.kind_name());
            match seg {
                Segment::Station(st) => {
                    for (k, v) in st.kind().keys().iter().zip(st.params()) {
                        let _ = writeln!(s, "{k} = {v:?}");
                    }
                }
                Segment::Channel(raw) => {
                    let _ = writeln!(s, "k = {}", list(&raw.k));
                    if let Some(m) = &raw.m {
                        let _ = writeln!(s, "m = {}", list(m));
                    }
                    let _ = writeln!(s, "alpha = {}", list(&raw.alpha));
                }
            }
        }
        if let Some(st) = &self.state {
            let _ = writeln!(s, "\n[state]");
            let _ = writeln!(s, "gamma = {}", list(&st.gamma));
            if let Some(d) = &st.d {
                let _ = writeln!(s, "d = {}", list(d));
            }
        }
        s
    }
}

fn seg_loc(i: usize, seg: &Segment, e: &Error) -> Loc {
    match (seg, e) {
        (Segment::Station(_), Error::OutOfRange { field, .. }) => Loc::SegmentKey(i, field.clone()),
        (Segment::Channel(_), Error::Unphysical { .. }) => Loc::SegmentKey(i, "alpha".into()),
        _ => Loc::Segment(i),
    }
}

fn list(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|x| format!("{x:?}")).collect();
    format!("[{}]", items.join(", "))
}

#[derive(Debug)]
enum Section {
    Top,
    Sweep,
    Segment,
    State,
}

#[derive(Default)]
struct RawBlock {
    line: usize,
    entries: Vec<(String, String, usize, usize)>,
}

struct Parser {
    errors: Vec<ParseError>,
    positions: HashMap<Loc, (usize, usize)>,
}

impl Parser {
    fn err(&mut self, line: usize, column: usize, message: impl Into<String>) {
        self.errors.push(ParseError {
            line,
            column,
            message: message.into(),
        });
    }

    fn number(&mut self, value: &str, key: &str, line: usize, col: usize) -> Option<f64> {
        match value.parse::<f64>() {
            Ok(v) => Some(v),
            Err(_) => {
                self.err(line, col, format!("{key}: expected a number, found {value:?}"));
                None
            }
        }
    }

    fn integer(&mut self, value: &str, key: &str, line: usize, col: usize) -> Option<usize> {
        match value.parse::<usize>() {
            Ok(v) => Some(v),
            Err(_) => {
                self.err(line, col, format!("{key}: expected a nonnegative integer, found {value:?}"));
                None
            }
        }
    }

    fn number_list(&mut self, value: &str, key: &str, line: usize, col: usize) -> Option<Vec<f64>> {
        let inner = value.strip_prefix('[').and_then(|v| v.strip_suffix(']'));
        let Some(inner) = inner else {
            self.err(line, col, format!("{key}: expected a bracketed list like [1, 0, 0, 1]"));
            return None;
        };
        if inner.trim().is_empty() {
            return Some(Vec::new());
        }
        let mut out = Vec::new();
        let mut offset = 1;
        for item in inner.split(',') {
            let lead = item.len() - item.trim_start().len();
            let item_col = col + offset + lead;
            out.push(self.number(item.trim(), key, line, item_col)?);
            offset += item.len() + 1;
        }
        Some(out)
    }
}

/// Parses and validates a scenario, collecting every positioned problem.
pub fn parse_scenario(text: &str) -> std::result::Result<Scenario, ParseErrors> {
    let mut p = Parser {
        errors: Vec::new(),
        positions: HashMap::new(),
    };
    let mut section = Section::Top;
    let mut top = RawBlock::default();
    let mut sweep: Option<RawBlock> = None;
    let mut state: Option<RawBlock> = None;
    let mut segments: Vec<RawBlock> = Vec::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw_line.split('#').next().unwrap_or("");
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indent = content.len() - content.trim_start().len();
        if trimmed.starts_with('[') && !trimmed.contains('=') {
            let block = RawBlock {
                line,
                entries: Vec::new(),
            };
            match trimmed {
                "[sweep]" if sweep.is_none() => {
                    section = Section::Sweep;
                    sweep = Some(block);
                }
                "[state]" if state.is_none() => {
                    section = Section::State;
                    state = Some(block);
                }
                "[segment]" => {
                    section = Section::Segment;
                    segments.push(block);
                }
                "[sweep]" | "[state]" => p.err(line, indent + 1, format!("duplicate {trimmed} block")),
                other => p.err(line, indent + 1, format!("unknown section {other}")),
            }
            continue;
        }
        let Some(eq) = content.find('=') else {
            p.err(line, indent + 1, format!("expected `key = value`, found {trimmed:?}"));
            continue;
        };
        let key = content[..eq].trim().to_string();
        let value_raw = &content[eq + 1..];
        let value = value_raw.trim().to_string();
        let value_col = eq + 2 + (value_raw.len() - value_raw.trim_start().len());
        if key.is_empty() {
            p.err(line, indent + 1, "missing key before `=`");
            continue;
        }
        let entry = (key, value, line, value_col);
        match section {
            Section::Top => top.entries.push(entry),
            Section::Sweep => sweep.as_mut().expect("in sweep").entries.push(entry),
            Section::State => state.as_mut().expect("in state").entries.push(entry),
            Section::Segment => segments.last_mut().expect("in segment").entries.push(entry),
        }
    }

    let mut name = None;
    let mut modes = 1usize;
    let mut outputs = None;
    for (key, value, line, col) in &top.entries {
        let (line, col) = (*line, *col);
        match key.as_str() {
            "name" => {
                p.positions.insert(Loc::Top("name"), (line, col));
                name = Some(value.clone());
            }
            "ordering" => {
                if value != "xxpp" {
                    p.err(line, col, format!("ordering: only xxpp is supported, found {value:?}"));
                }
            }
            "modes" => {
                p.positions.insert(Loc::Top("modes"), (line, col));
                if let Some(v) = p.integer(value, "modes", line, col) {
                    modes = v;
                }
            }
            "outputs" => {
                p.positions.insert(Loc::Top("outputs"), (line, col));
                let mut list = Vec::new();
                for item in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    match Output::from_name(item) {
                        Some(o) if !list.contains(&o) => list.push(o),
                        Some(_) => {}
                        None => p.err(
                            line,
                            col,
                            format!("outputs: unknown output {item:?} (expected compose, decompose, eb, thresholds, bound)"),
                        ),
                    }
                }
                outputs = Some(list);
            }
            other => p.err(line, 1, format!("unknown top-level key {other:?}")),
        }
    }
    if name.is_none() {
        p.err(1, 1, "missing `name`");
    }

    let mut chain = Vec::with_capacity(segments.len());
    for (i, block) in segments.iter().enumerate() {
        p.positions.insert(Loc::Segment(i), (block.line, 1));
        if let Some(seg) = parse_segment(&mut p, i, block) {
            chain.push(seg);
        }
    }

    let sweep = sweep.and_then(|b| parse_sweep(&mut p, &b));
    let state = state.and_then(|b| parse_state(&mut p, &b));

    if !p.errors.is_empty() {
        return Err(ParseErrors(p.errors));
    }
    let scenario = Scenario {
        name: name.unwrap_or_default(),
        modes,
        chain,
        sweep,
        outputs: outputs.unwrap_or_else(default_outputs),
        state,
    };
    let problems = scenario.problems();
    if problems.is_empty() {
        return Ok(scenario);
    }
    let errors = problems
        .into_iter()
        .map(|(loc, message)| {
            let (line, column) = p
                .positions
                .get(&loc)
                .or_else(|| match &loc {
                    Loc::SegmentKey(i, _) => p.positions.get(&Loc::Segment(*i)),
                    _ => None,
                })
                .copied()
                .unwrap_or((1, 1));
            ParseError { line, column, message }
        })
        .collect();
    Err(ParseErrors(errors))
}

fn parse_segment(p: &mut Parser, i: usize, block: &RawBlock) -> Option<Segment> {
    let Some((_, kind, kline, kcol)) = block.entries.iter().find(|e| e.0 == "kind") else {
        p.err(block.line, 1, format!("segment {} has no `kind`", i + 1));
        return None;
    };
    if kind == "channel" {
        let (mut k, mut m, mut alpha) = (None, None, None);
        for (key, value, line, col) in &block.entries {
            match key.as_str() {
                "kind" => {}
                "k" => k = p.number_list(value, "k", *line, *col),
                "m" => m = p.number_list(value, "m", *line, *col),
                "alpha" => alpha = p.number_list(value, "alpha", *line, *col),
                other => p.err(*line, 1, format!("channel segment: unknown key {other:?} (expected k, m, alpha)")),
            }
            p.positions.insert(Loc::SegmentKey(i, key.clone()), (*line, *col));
        }
        let (Some(k), Some(alpha)) = (k, alpha) else {
            p.err(block.line, 1, format!("segment {}: channel needs both `k` and `alpha`", i + 1));
            return None;
        };
        return Some(Segment::Channel(RawChannel::new(k, m, alpha)));
    }
    let Some(sk) = StationKind::from_name(kind) else {
        p.err(
            *kline,
            *kcol,
            format!("unknown kind {kind:?} (expected loss, pic, anc, psa, pia, rotation or channel)"),
        );
        return None;
    };
    let keys = sk.keys();
    let mut values: Vec<Option<f64>> = keys.iter().map(|k| sk.default_for(k)).collect();
    let mut ok = true;
    for (key, value, line, col) in &block.entries {
        if key == "kind" {
            continue;
        }
        match keys.iter().position(|k| k == key) {
            Some(j) => {
                p.positions.insert(Loc::SegmentKey(i, key.clone()), (*line, *col));
                match p.number(value, key, *line, *col) {
                    Some(v) => values[j] = Some(v),
                    None => ok = false,
                }
            }
            None => {
                p.err(
                    *line,
                    1,
                    format!("{kind} segment: unknown key {key:?} (expected {})", keys.join(", ")),
                );
                ok = false;
            }
        }
    }
    let mut params = Vec::with_capacity(keys.len());
    for (k, v) in keys.iter().zip(values) {
        match v {
            Some(v) => params.push(v),
            None => {
                p.err(block.line, 1, format!("segment {} ({kind}): missing `{k}`", i + 1));
                ok = false;
            }
        }
    }
    if !ok {
        return None;
    }
    StationSpec::from_params(sk, &params).ok().map(Segment::Station)
}

fn parse_sweep(p: &mut Parser, block: &RawBlock) -> Option<Sweep> {
    let (mut path, mut min, mut max, mut steps) = (None, None, None, None);
    for (key, value, line, col) in &block.entries {
        let (line, col) = (*line, *col);
        match key.as_str() {
            "parameter" => {
                p.positions.insert(Loc::Sweep("parameter"), (line, col));
                let parts: Vec<&str> = value.split('.').collect();
                match parts.as_slice() {
                    ["segment", idx, key] => match idx.parse::<usize>() {
                        Ok(n) if n >= 1 => path = Some((n, key.to_string())),
                        _ => p.err(line, col, format!("parameter: segment index must be 1-based, found {idx:?}")),
                    },
                    _ => p.err(line, col, format!("parameter: expected segment.<index>.<key>, found {value:?}")),
                }
            }
            "min" => {
                p.positions.insert(Loc::Sweep("min"), (line, col));
                min = p.number(value, "min", line, col);
            }
            "max" => {
                p.positions.insert(Loc::Sweep("max"), (line, col));
                max = p.number(value, "max", line, col);
            }
            "steps" => {
                p.positions.insert(Loc::Sweep("steps"), (line, col));
                steps = p.integer(value, "steps", line, col);
            }
            other => p.err(line, 1, format!("sweep: unknown key {other:?} (expected parameter, min, max, steps)")),
        }
    }
    match (path, min, max, steps) {
        (Some((segment, key)), Some(min), Some(max), Some(steps)) => Some(Sweep {
            segment,
            key,
            min,
            max,
            steps,
        }),
        _ => {
            p.err(block.line, 1, "sweep needs parameter, min, max and steps");
            None
        }
    }
}

fn parse_state(p: &mut Parser, block: &RawBlock) -> Option<StateSpec> {
    let (mut gamma, mut d) = (None, None);
    for (key, value, line, col) in &block.entries {
        match key.as_str() {
            "gamma" => {
                p.positions.insert(Loc::State("gamma"), (*line, *col));
                gamma = p.number_list(value, "gamma", *line, *col);
            }
            "d" => d = p.number_list(value, "d", *line, *col),
            other => p.err(*line, 1, format!("state: unknown key {other:?} (expected gamma, d)")),
        }
    }
    match gamma {
        Some(gamma) => Some(StateSpec { gamma, d }),
        None => {
            p.err(block.line, 1, "state needs `gamma`");
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PSA: &str = "name = psa\nmodes = 1\noutputs = eb, bound\n\n[sweep]\nparameter = segment.2.gain\nmin = 1\nmax = 5\nsteps = 81\n\n[segment]\nkind = loss\neta = 0.5\n\n[segment]\nkind = psa\ngain = 2\n\n[segment]\nkind = loss\neta = 0.5\n";

    #[test]
    fn minimal_loss() {
        let sc = parse_scenario("name = l\n[segment]\nkind = loss\neta = 0.3\n").unwrap();
        assert_eq!(sc.chain, vec![Segment::Station(StationSpec::Loss { eta: 0.3 })]);
        assert_eq!(sc.outputs, vec![Output::Compose]);
        assert_eq!(sc.points(), 1);
    }

    #[test]
    fn psa_sweep_points() {
        let sc = parse_scenario(PSA).unwrap();
        assert_eq!(sc.points(), 81);
        let v = sc.sweep.as_ref().unwrap().values();
        assert_eq!(v[0], 1.0);
        assert_eq!(v[80], 5.0);
        assert_eq!(v[40], 3.0);
        assert_eq!(sc.chain[1], Segment::Station(StationSpec::Psa { gain: 2.0, angle: 0.0 }));
    }

    #[test]
    fn out_of_range_names_field() {
        let err = parse_scenario("name = x\n\n[segment]\nkind = loss\neta = 1.2\n").unwrap_err();
        assert_eq!(err.0.len(), 1);
        let e = &err.0[0];
        assert_eq!((e.line, e.column), (5, 7));
        assert!(e.message.contains("eta"), "{}", e.message);
    }

    #[test]
    fn unknown_kind_and_bad_sweep() {
        let text = "name = x\n[sweep]\nparameter = segment.9.gain\nmin = 1\nmax = 2\nsteps = 3\n[segment]\nkind = laser\n";
        let err = parse_scenario(text).unwrap_err();
        assert!(err.0.iter().any(|e| e.line == 8 && e.message.contains("laser")));
        let text = "name = x\n[sweep]\nparameter = gain\nmin = 1\nmax = 2\nsteps = 3\n[segment]\nkind = loss\neta = 0.5\n";
        let err = parse_scenario(text).unwrap_err();
        assert!(err.0.iter().any(|e| e.line == 3));
    }

    #[test]
    fn sweep_range_is_checked() {
        let text = PSA.replace("min = 1", "min = 0.5");
        let err = parse_scenario(&text).unwrap_err();
        assert_eq!(err.0[0].line, 7);
        assert!(err.0[0].message.contains("gain"));
    }

    #[test]
    fn relay_shape_is_checked() {
        let text = "name = x\noutputs = decompose\n[segment]\nkind = psa\ngain = 2\n";
        let err = parse_scenario(text).unwrap_err();
        assert_eq!(err.0[0].line, 2);
    }

    #[test]
    fn render_round_trip() {
        let mut sc = parse_scenario(PSA).unwrap();
        sc.chain.push(Segment::Channel(RawChannel::new(
            vec![1.0, 0.0, 0.0, 1.0],
            Some(vec![0.1, -0.2]),
            vec![0.1, 0.0, 0.0, 0.1],
        )));
        sc.state = Some(StateSpec {
            gamma: vec![0.5, 0.0, 0.0, 0.5],
            d: None,
        });
        sc.outputs = vec![Output::Compose, Output::Bound];
        assert_eq!(parse_scenario(&sc.render()).unwrap(), sc);
    }

    #[test]
    fn json_round_trip() {
        let sc = parse_scenario(PSA).unwrap();
        assert_eq!(Scenario::from_json(&sc.to_json()).unwrap(), sc);
        let raw = r#"{"name": "j", "chain": [{"kind": "loss", "eta": 0.5}, {"kind": "channel", "k": [1,0,0,1], "alpha": [0,0,0,0]}]}"#;
        let sc = Scenario::from_json(raw).unwrap();
        assert_eq!(sc.chain.len(), 2);
        assert!(Scenario::from_json(r#"{"name": "j", "chain": [{"kind": "loss", "eta": 2}]}"#).is_err());
    }

    #[test]
    fn collects_several_errors() {
        let text = "name = x\nbogus = 1\n[segment]\nkind = loss\neta = abc\n[segment]\nkind = psa\n";
        let err = parse_scenario(text).unwrap_err();
        assert!(err.0.len() >= 3, "{err}");
    }
}
