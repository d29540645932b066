//! Line-oriented job configuration: `key = value` pairs under `[job]`,
//! `[model]`, `[render]`, `[sweep]` and `[output]` headers, `#` comments,
//! comma-separated lists. Numbers accept decimals, `p/q` fractions and, where
//! a parameter is complex, literals such as `-0.117-0.76i`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::network::{build_bipartite, build_bipartite_random, build_model, AdjacencyBlock, BlockWeights, ModelKind, WeightMatrix};
use crate::render::{Box3D, SetKind, Window2D, DEFAULT_COMPLEX_BUDGET, DEFAULT_RADIUS, DEFAULT_REAL_BUDGET};
use crate::topology::{Connectivity, DEFAULT_TOLERANCE};

const SECTIONS: [&str; 5] = ["job", "model", "render", "sweep", "output"];

fn allowed_keys(section: &str) -> &'static [&'static str] {
    match section {
        "job" => &["id", "kind", "target", "check", "seed"],
        "model" => &[
            "model", "a", "b", "f", "nodes", "weights", "half", "clique", "a1", "a2", "g", "gxx", "gxy",
            "gyx", "gyy", "nxy", "nyx",
        ],
        "render" => &["c", "window", "box", "resolution", "iterations", "radius", "connectivity", "tolerance"],
        "sweep" => &["a", "b", "f", "g", "c"],
        "output" => &["dir"],
        _ => &[],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JobKind {
    Render(SetKind),
    Sweep,
    Analyze,
    Verify,
}

impl JobKind {
    pub fn name(self) -> &'static str {
        match self {
            JobKind::Render(kind) => kind.name(),
            JobKind::Sweep => "sweep",
            JobKind::Analyze => "analyze",
            JobKind::Verify => "verify",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sweep" => JobKind::Sweep,
            "analyze" => JobKind::Analyze,
            "verify" => JobKind::Verify,
            other => JobKind::Render(set_kind_from_name(other)?),
        })
    }
}

pub fn set_kind_from_name(name: &str) -> Option<SetKind> {
    Some(match name {
        "equi-m" => SetKind::EquiM,
        "uni-j" => SetKind::UniJ,
        "multi-m-real" => SetKind::MultiMReal,
        "multi-j-real" => SetKind::MultiJReal,
        _ => return None,
    })
}

fn is_planar(kind: SetKind) -> bool {
    matches!(kind, SetKind::EquiM | SetKind::UniJ)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    Classical,
    Prop1,
    Prop2,
    Prop3,
    Nesting,
    Conjecture,
    RealContrast,
    Dimension,
}

impl Check {
    pub const ALL: [Check; 8] = [
        Check::Classical,
        Check::Prop1,
        Check::Prop2,
        Check::Prop3,
        Check::Nesting,
        Check::Conjecture,
        Check::RealContrast,
        Check::Dimension,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Classical => "classical",
            Check::Prop1 => "prop1",
            Check::Prop2 => "prop2",
            Check::Prop3 => "prop3",
            Check::Nesting => "nesting",
            Check::Conjecture => "conjecture",
            Check::RealContrast => "real-contrast",
            Check::Dimension => "dimension",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Check::ALL.into_iter().find(|c| c.name() == name)
    }

    /// Resolution per axis used when the config does not set one.
    pub fn default_resolution(self) -> usize {
        match self {
            Check::Conjecture => 800,
            Check::RealContrast => 200,
            Check::Dimension => 1200,
            _ => 600,
        }
    }

    pub fn default_iterations(self) -> u32 {
        match self {
            Check::RealContrast => DEFAULT_REAL_BUDGET,
            _ => DEFAULT_COMPLEX_BUDGET,
        }
    }

    fn rank(self) -> usize {
        match self {
            Check::RealContrast => 3,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    /// One of the three-node models, or an explicit weight matrix.
    Named(ModelKind),
    Bipartite {
        clique: AdjacencyBlock,
        x_to_y: AdjacencyBlock,
        y_to_x: AdjacencyBlock,
        g: BlockWeights,
    },
    /// Edge positions come from the job seed.
    BipartiteRandom {
        half: usize,
        x_to_y: usize,
        y_to_x: usize,
        g: BlockWeights,
    },
}

impl ModelSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::Named(kind) => kind.name(),
            ModelSpec::Bipartite { .. } => "bipartite",
            ModelSpec::BipartiteRandom { .. } => "bipartite-random",
        }
    }

    pub fn nodes(&self) -> usize {
        match self {
            ModelSpec::Named(ModelKind::General(w)) => w.order(),
            ModelSpec::Named(_) => 3,
            ModelSpec::Bipartite { clique, .. } => 2 * clique.size(),
            ModelSpec::BipartiteRandom { half, .. } => 2 * half,
        }
    }

    pub fn build(&self, seed: u64) -> Result<WeightMatrix> {
        match self {
            ModelSpec::Named(kind) => build_model(kind, self.nodes()),
            ModelSpec::Bipartite {
                clique,
                x_to_y,
                y_to_x,
                g,
            } => build_bipartite(clique, x_to_y, y_to_x, *g),
            ModelSpec::BipartiteRandom {
                half,
                x_to_y,
                y_to_x,
                g,
            } => build_bipartite_random(*half, *x_to_y, *y_to_x, *g, seed),
        }
    }

    /// The `(a, b, f)` coupling constants of a three-node model.
    pub fn couplings(&self) -> (Option<f64>, Option<f64>, Option<f64>) {
        match self {
            ModelSpec::Named(ModelKind::SimpleDual { a }) => (Some(*a), None, None),
            ModelSpec::Named(ModelKind::SelfDrive { a, b }) => (Some(*a), Some(*b), None),
            ModelSpec::Named(ModelKind::Feedback { a, b, f }) => (Some(*a), Some(*b), Some(*f)),
            _ => (None, None, None),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    A,
    B,
    F,
    G,
    C,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::A => "a",
            SweepParam::B => "b",
            SweepParam::F => "f",
            SweepParam::G => "g",
            SweepParam::C => "c",
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "a" => SweepParam::A,
            "b" => SweepParam::B,
            "f" => SweepParam::F,
            "g" => SweepParam::G,
            "c" => SweepParam::C,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub param: SweepParam,
    /// Complex only on the `c` axis; coupling axes hold real values.
    pub values: Vec<Complex64>,
}

/// A fully validated job with every default filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct JobSpec {
    pub id: String,
    pub kind: JobKind,
    /// Set rendered by sweep and analyze jobs.
    pub target: Option<SetKind>,
    pub check: Option<Check>,
    pub seed: u64,
    /// Absent only for verify jobs, whose checks fix their own models.
    pub model: Option<ModelSpec>,
    /// Empty, one equi-parameter value, or one value per node.
    pub parameter: Vec<Complex64>,
    /// `[re_min, re_max, im_min, im_max]` for planar sets.
    pub window: Option<[f64; 4]>,
    /// `[x_min, x_max, y_min, y_max, z_min, z_max]` for real 3-D sets.
    pub bbox: Option<[f64; 6]>,
    pub resolution: Vec<usize>,
    pub iterations: u32,
    pub radius: f64,
    pub connectivity: Connectivity,
    pub tolerance: f64,
    /// Outer axis first.
    pub sweep: Vec<SweepAxis>,
    pub output_dir: PathBuf,
}

impl JobSpec {
    /// The set this job renders, if any.
    pub fn set_kind(&self) -> Option<SetKind> {
        match self.kind {
            JobKind::Render(kind) => Some(kind),
            JobKind::Sweep | JobKind::Analyze => self.target,
            JobKind::Verify => None,
        }
    }

    pub fn window2d(&self) -> Result<Window2D> {
        let w = self
            .window
            .ok_or_else(|| Error::domain(format!("job {} has no window", self.id)))?;
        Window2D::new(w[0], w[1], w[2], w[3], self.resolution[0], self.resolution[1])
    }

    pub fn box3d(&self) -> Result<Box3D> {
        let b = self
            .bbox
            .ok_or_else(|| Error::domain(format!("job {} has no box", self.id)))?;
        let r = &self.resolution;
        Box3D::new([b[0], b[2], b[4]], [b[1], b[3], b[5]], [r[0], r[1], r[2]])
    }

    /// The parameter vector expanded to one value per node.
    pub fn parameter_values(&self, nodes: usize) -> Result<Vec<Complex64>> {
        match self.parameter.len() {
            1 => Ok(vec![self.parameter[0]; nodes]),
            len if len == nodes => Ok(self.parameter.clone()),
            len => Err(Error::dimension(format!(
                "parameter has {len} entries but the network has {nodes} nodes"
            ))),
        }
    }
}

/// One `key = value` line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub section: String,
    pub key: String,
    pub value: String,
    /// 1-based source line; 0 for command-line overrides.
    pub line: usize,
}

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_entries(text: &str) -> Result<Vec<Entry>> {
    let mut entries: Vec<Entry> = Vec::new();
    let mut section: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| parse_error(line, format!("malformed section header `{content}`")))?
                .trim();
            if !SECTIONS.contains(&name) {
                return Err(parse_error(line, format!("unknown section [{name}]")));
            }
            section = Some(name.to_string());
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| parse_error(line, format!("expected `key = value`, got `{content}`")))?;
        let section = section
            .clone()
            .ok_or_else(|| parse_error(line, "key outside of any section"))?;
        let entry = Entry {
            section,
            key: key.trim().to_string(),
            value: value.trim().to_string(),
            line,
        };
        check_entry(&entry)?;
        if let Some(prev) = entries.iter().find(|e| e.section == entry.section && e.key == entry.key) {
            return Err(parse_error(
                line,
                format!("duplicate key {}.{} (first set on line {})", entry.section, entry.key, prev.line),
            ));
        }
        entries.push(entry);
    }
    Ok(entries)
}

fn check_entry(entry: &Entry) -> Result<()> {
    if !allowed_keys(&entry.section).contains(&entry.key.as_str()) {
        return Err(parse_error(
            entry.line,
            format!("unknown key `{}` in [{}]", entry.key, entry.section),
        ));
    }
    if entry.value.is_empty() {
        return Err(parse_error(entry.line, format!("key `{}` has no value", entry.key)));
    }
    Ok(())
}

/// Applies a `section.key=value` override, replacing any existing entry.
pub fn apply_override(entries: &mut Vec<Entry>, assignment: &str) -> Result<()> {
    let (path, value) = assignment
        .split_once('=')
        .ok_or_else(|| parse_error(0, format!("override `{assignment}` is not section.key=value")))?;
    let (section, key) = path
        .trim()
        .split_once('.')
        .ok_or_else(|| parse_error(0, format!("override `{assignment}` is not section.key=value")))?;
    if !SECTIONS.contains(&section) {
        return Err(parse_error(0, format!("unknown section [{section}] in override")));
    }
    let entry = Entry {
        section: section.to_string(),
        key: key.to_string(),
        value: value.trim().to_string(),
        line: 0,
    };
    check_entry(&entry)?;
    entries.retain(|e| !(e.section == entry.section && e.key == entry.key));
    entries.push(entry);
    Ok(())
}

pub fn parse_config(text: &str) -> Result<JobSpec> {
    spec_from_entries(&parse_entries(text)?)
}

/// Parses a real number: decimal, scientific, or `p/q`.
pub fn parse_real(text: &str) -> Option<f64> {
    let text = text.trim();
    let value = match text.split_once('/') {
        Some((p, q)) => {
            let (p, q) = (p.trim().parse::<f64>().ok()?, q.trim().parse::<f64>().ok()?);
            if q == 0.0 {
                return None;
            }
            p / q
        }
        None => text.parse::<f64>().ok()?,
    };
    value.is_finite().then_some(value)
}

/// Parses `x`, `yi`, `x+yi` or `x-yi`, where each part is a real as accepted
/// by [`parse_real`].
pub fn parse_complex(text: &str) -> Option<Complex64> {
    let compact: String = text.chars().filter(|ch| !ch.is_whitespace()).collect();
    let Some(body) = compact.strip_suffix('i') else {
        return parse_real(&compact).map(|re| Complex64::new(re, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |part: &str| match part {
        "" | "+" => Some(1.0),
        "-" => Some(-1.0),
        other => parse_real(other),
    };
    match split {
        Some(k) => Some(Complex64::new(parse_real(&body[..k])?, imag(&body[k..])?)),
        None => Some(Complex64::new(0.0, imag(body)?)),
    }
}

fn split_list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim)
}

/// Keyed view over the entries with typed accessors that report line numbers.
struct Fields<'a> {
    map: HashMap<(&'a str, &'a str), &'a Entry>,
}

impl<'a> Fields<'a> {
    fn new(entries: &'a [Entry]) -> Self {
        let map = entries
            .iter()
            .map(|e| ((e.section.as_str(), e.key.as_str()), e))
            .collect();
        Fields { map }
    }

    fn get(&self, section: &str, key: &str) -> Option<&'a Entry> {
        self.map.get(&(section, key)).copied()
    }

    fn has_section(&self, section: &str) -> bool {
        self.map.keys().any(|(s, _)| *s == section)
    }

    fn keys_in(&self, section: &str) -> Vec<&'a Entry> {
        let mut found: Vec<&Entry> = self.map.values().copied().filter(|e| e.section == section).collect();
        found.sort_by_key(|e| (e.line == 0, e.line));
        found
    }

    fn require(&self, section: &str, key: &str, context: &str) -> Result<&'a Entry> {
        self.get(section, key)
            .ok_or_else(|| parse_error(0, format!("missing required key {section}.{key} for {context}")))
    }

    fn real(&self, section: &str, key: &str) -> Result<Option<f64>> {
        self.get(section, key)
            .map(|e| parse_real(&e.value).ok_or_else(|| malformed(e, "a finite number")))
            .transpose()
    }

    fn req_real(&self, section: &str, key: &str, context: &str) -> Result<f64> {
        let e = self.require(section, key, context)?;
        parse_real(&e.value).ok_or_else(|| malformed(e, "a finite number"))
    }

    fn uint<T: std::str::FromStr>(&self, section: &str, key: &str) -> Result<Option<T>> {
        self.get(section, key)
            .map(|e| e.value.parse::<T>().map_err(|_| malformed(e, "a non-negative integer")))
            .transpose()
    }

    fn real_list(&self, section: &str, key: &str) -> Result<Option<Vec<f64>>> {
        self.get(section, key)
            .map(real_list)
            .transpose()
    }
}

fn malformed(entry: &Entry, expected: &str) -> Error {
    parse_error(
        entry.line,
        format!("malformed value `{}` for {}: expected {expected}", entry.value, entry.key),
    )
}

fn real_list(entry: &Entry) -> Result<Vec<f64>> {
    split_list(&entry.value)
        .map(|item| parse_real(item).ok_or_else(|| malformed(entry, "a list of finite numbers")))
        .collect()
}

fn uint_list(entry: &Entry) -> Result<Vec<usize>> {
    split_list(&entry.value)
        .map(|item| item.parse::<usize>().map_err(|_| malformed(entry, "a list of non-negative integers")))
        .collect()
}

fn block(entry: &Entry, half: usize) -> Result<AdjacencyBlock> {
    let cells = uint_list(entry)?;
    if cells.iter().any(|&v| v > 1) {
        return Err(malformed(entry, "0/1 entries"));
    }
    if cells.len() != half * half {
        return Err(parse_error(
            entry.line,
            format!("{} needs {} entries for half = {half}, got {}", entry.key, half * half, cells.len()),
        ));
    }
    AdjacencyBlock::from_cells(half, cells.into_iter().map(|v| v == 1).collect())
}

fn reject_keys(fields: &Fields, section: &str, keys: &[&str], context: &str) -> Result<()> {
    for key in keys {
        if let Some(e) = fields.get(section, key) {
            return Err(parse_error(e.line, format!("key `{key}` does not apply to {context}")));
        }
    }
    Ok(())
}

fn block_weights(fields: &Fields, model: &str) -> Result<BlockWeights> {
    if let Some(g) = fields.real("model", "g")? {
        reject_keys(fields, "model", &["gxx", "gxy", "gyx", "gyy"], "a model that sets g")?;
        return Ok(BlockWeights::balanced(g));
    }
    Ok(BlockWeights {
        xx: fields.req_real("model", "gxx", model)?,
        xy: fields.req_real("model", "gxy", model)?,
        yx: fields.req_real("model", "gyx", model)?,
        yy: fields.req_real("model", "gyy", model)?,
    })
}

fn parse_model(fields: &Fields) -> Result<ModelSpec> {
    let entry = fields.require("model", "model", "a rendering job")?;
    let name = entry.value.as_str();
    let three_node = ["nodes", "weights", "half", "clique", "a1", "a2", "g", "gxx", "gxy", "gyx", "gyy", "nxy", "nyx"];
    let context = format!("model {name}");
    let spec = match name {
        "simple-dual" => {
            reject_keys(fields, "model", &three_node, &context)?;
            reject_keys(fields, "model", &["b", "f"], &context)?;
            ModelSpec::Named(ModelKind::SimpleDual {
                a: fields.req_real("model", "a", &context)?,
            })
        }
        "self-drive" => {
            reject_keys(fields, "model", &three_node, &context)?;
            reject_keys(fields, "model", &["f"], &context)?;
            ModelSpec::Named(ModelKind::SelfDrive {
                a: fields.req_real("model", "a", &context)?,
                b: fields.req_real("model", "b", &context)?,
            })
        }
        "feedback" => {
            reject_keys(fields, "model", &three_node, &context)?;
            ModelSpec::Named(ModelKind::Feedback {
                a: fields.req_real("model", "a", &context)?,
                b: fields.req_real("model", "b", &context)?,
                f: fields.req_real("model", "f", &context)?,
            })
        }
        "general" => {
            reject_keys(fields, "model", &["a", "b", "f", "half", "clique", "a1", "a2", "g", "gxx", "gxy", "gyx", "gyy", "nxy", "nyx"], &context)?;
            let weights_entry = fields.require("model", "weights", &context)?;
            let weights = real_list(weights_entry)?;
            let n = match fields.uint::<usize>("model", "nodes")? {
                Some(n) => n,
                None => (weights.len() as f64).sqrt().round() as usize,
            };
            if n == 0 || n * n != weights.len() {
                return Err(parse_error(
                    weights_entry.line,
                    format!("weights has {} entries, not a square matrix of order {n}", weights.len()),
                ));
            }
            ModelSpec::Named(ModelKind::General(WeightMatrix::new(n, weights)?))
        }
        "bipartite" => {
            reject_keys(fields, "model", &["a", "b", "f", "nodes", "weights", "nxy", "nyx"], &context)?;
            let half = fields
                .uint::<usize>("model", "half")?
                .ok_or_else(|| parse_error(0, format!("missing required key model.half for {context}")))?;
            let clique = match fields.get("model", "clique") {
                Some(e) => block(e, half)?,
                None => AdjacencyBlock::ones(half),
            };
            ModelSpec::Bipartite {
                clique,
                x_to_y: block(fields.require("model", "a1", &context)?, half)?,
                y_to_x: block(fields.require("model", "a2", &context)?, half)?,
                g: block_weights(fields, &context)?,
            }
        }
        "bipartite-random" => {
            reject_keys(fields, "model", &["a", "b", "f", "nodes", "weights", "clique", "a1", "a2"], &context)?;
            let count = |key: &str| -> Result<usize> {
                fields
                    .uint::<usize>("model", key)?
                    .ok_or_else(|| parse_error(0, format!("missing required key model.{key} for {context}")))
            };
            ModelSpec::BipartiteRandom {
                half: count("half")?,
                x_to_y: count("nxy")?,
                y_to_x: count("nyx")?,
                g: block_weights(fields, &context)?,
            }
        }
        other => return Err(parse_error(entry.line, format!("unknown model `{other}`"))),
    };
    if let ModelSpec::BipartiteRandom { half, x_to_y, y_to_x, .. } = &spec {
        if *half == 0 || *x_to_y > half * half || *y_to_x > half * half {
            return Err(parse_error(entry.line, format!("edge counts out of range for half = {half}")));
        }
    }
    if let ModelSpec::Bipartite { clique, .. } = &spec {
        if clique.size() == 0 {
            return Err(parse_error(entry.line, "half must be at least 1"));
        }
    }
    Ok(spec)
}

fn parse_parameter(fields: &Fields, kind: SetKind) -> Result<Vec<Complex64>> {
    let needs = matches!(kind, SetKind::UniJ | SetKind::MultiJReal);
    let Some(entry) = fields.get("render", "c") else {
        if needs && !has_sweep_axis(fields, "c") {
            return Err(parse_error(0, format!("missing required key render.c for {}", kind.name())));
        }
        return Ok(Vec::new());
    };
    if !needs {
        return Err(parse_error(entry.line, format!("key `c` does not apply to {}", kind.name())));
    }
    let values = split_list(&entry.value)
        .map(|item| parse_complex(item).ok_or_else(|| malformed(entry, "a list of complex numbers")))
        .collect::<Result<Vec<_>>>()?;
    if kind == SetKind::MultiJReal && values.iter().any(|v| v.im != 0.0) {
        return Err(parse_error(entry.line, "multi-j-real takes a real parameter"));
    }
    Ok(values)
}

fn has_sweep_axis(fields: &Fields, name: &str) -> bool {
    fields.get("sweep", name).is_some()
}

fn parse_resolution(fields: &Fields, rank: usize, default: usize) -> Result<Vec<usize>> {
    let Some(entry) = fields.get("render", "resolution") else {
        return Ok(vec![default; rank]);
    };
    let values = uint_list(entry)?;
    let resolved = match values.len() {
        1 => vec![values[0]; rank],
        len if len == rank => values,
        len => {
            return Err(parse_error(
                entry.line,
                format!("resolution needs 1 or {rank} entries, got {len}"),
            ))
        }
    };
    if resolved.contains(&0) {
        return Err(parse_error(entry.line, "resolution entries must be at least 1"));
    }
    Ok(resolved)
}

fn parse_region(fields: &Fields, kind: SetKind) -> Result<(Option<[f64; 4]>, Option<[f64; 6]>)> {
    if is_planar(kind) {
        reject_keys(fields, "render", &["box"], kind.name())?;
        let default = match kind {
            SetKind::EquiM => Window2D::equi_m_default(1, 1),
            _ => Window2D::uni_j_default(1, 1),
        };
        let window = match fields.real_list("render", "window")? {
            Some(v) if v.len() == 4 => [v[0], v[1], v[2], v[3]],
            Some(_) => {
                let e = fields.get("render", "window").expect("present");
                return Err(parse_error(e.line, "window needs re_min, re_max, im_min, im_max"));
            }
            None => [default.re_min, default.re_max, default.im_min, default.im_max],
        };
        if !(window[0] < window[1] && window[2] < window[3]) {
            let line = fields.get("render", "window").map_or(0, |e| e.line);
            return Err(parse_error(line, "window bounds must satisfy min < max"));
        }
        Ok((Some(window), None))
    } else {
        reject_keys(fields, "render", &["window"], kind.name())?;
        let default = Box3D::default_real(1);
        let bbox = match fields.real_list("render", "box")? {
            Some(v) if v.len() == 6 => [v[0], v[1], v[2], v[3], v[4], v[5]],
            Some(_) => {
                let e = fields.get("render", "box").expect("present");
                return Err(parse_error(e.line, "box needs x_min, x_max, y_min, y_max, z_min, z_max"));
            }
            None => [
                default.min[0],
                default.max[0],
                default.min[1],
                default.max[1],
                default.min[2],
                default.max[2],
            ],
        };
        if (0..3).any(|k| bbox[2 * k] >= bbox[2 * k + 1]) {
            let line = fields.get("render", "box").map_or(0, |e| e.line);
            return Err(parse_error(line, "box bounds must satisfy min < max"));
        }
        Ok((None, Some(bbox)))
    }
}

fn parse_sweep(fields: &Fields, model: &ModelSpec, target: SetKind) -> Result<Vec<SweepAxis>> {
    let mut axes = Vec::new();
    for entry in fields.keys_in("sweep") {
        let param = SweepParam::from_name(&entry.key).expect("validated key");
        let values = if param == SweepParam::C {
            let values = split_list(&entry.value)
                .map(|item| parse_complex(item).ok_or_else(|| malformed(entry, "a list of complex numbers")))
                .collect::<Result<Vec<_>>>()?;
            if target == SetKind::MultiJReal && values.iter().any(|v| v.im != 0.0) {
                return Err(parse_error(entry.line, "multi-j-real takes a real parameter"));
            }
            values
        } else {
            real_list(entry)?.into_iter().map(|x| Complex64::new(x, 0.0)).collect()
        };
        let applies = match param {
            SweepParam::A => model.couplings().0.is_some(),
            SweepParam::B => matches!(model, ModelSpec::Named(ModelKind::SelfDrive { .. } | ModelKind::Feedback { .. })),
            SweepParam::F => matches!(model, ModelSpec::Named(ModelKind::Feedback { .. })),
            SweepParam::G => matches!(model, ModelSpec::Bipartite { .. } | ModelSpec::BipartiteRandom { .. }),
            SweepParam::C => matches!(target, SetKind::UniJ | SetKind::MultiJReal),
        };
        if !applies {
            return Err(parse_error(
                entry.line,
                format!("sweep axis `{}` does not apply to model {} / {}", entry.key, model.name(), target.name()),
            ));
        }
        axes.push(SweepAxis { param, values });
    }
    Ok(axes)
}

/// Validates parsed (and possibly overridden) entries into a job.
pub fn spec_from_entries(entries: &[Entry]) -> Result<JobSpec> {
    let fields = Fields::new(entries);
    let kind_entry = fields.require("job", "kind", "any job")?;
    let kind = JobKind::from_name(&kind_entry.value)
        .ok_or_else(|| parse_error(kind_entry.line, format!("unknown job kind `{}`", kind_entry.value)))?;
    let id = fields
        .get("job", "id")
        .map_or_else(|| kind.name().to_string(), |e| e.value.clone());
    if id.contains(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '-' || ch == '_')) {
        let line = fields.get("job", "id").map_or(0, |e| e.line);
        return Err(parse_error(line, "id may only contain letters, digits, '-' and '_'"));
    }
    let seed = fields.uint::<u64>("job", "seed")?.unwrap_or(0);
    let output_dir = PathBuf::from(fields.get("output", "dir").map_or("out", |e| e.value.as_str()));
    let radius = fields.real("render", "radius")?.unwrap_or(DEFAULT_RADIUS);
    if radius <= 0.0 {
        let e = fields.get("render", "radius").expect("non-default radius");
        return Err(parse_error(e.line, "radius must be positive"));
    }
    let tolerance = fields.real("render", "tolerance")?.unwrap_or(DEFAULT_TOLERANCE);
    if !(0.0..=1.0).contains(&tolerance) {
        let e = fields.get("render", "tolerance").expect("non-default tolerance");
        return Err(parse_error(e.line, "tolerance must lie in [0, 1]"));
    }

    let target = match (kind, fields.get("job", "target")) {
        (JobKind::Sweep | JobKind::Analyze, Some(e)) => Some(
            set_kind_from_name(&e.value).ok_or_else(|| parse_error(e.line, format!("unknown target `{}`", e.value)))?,
        ),
        (JobKind::Sweep | JobKind::Analyze, None) => {
            return Err(parse_error(0, format!("missing required key job.target for {}", kind.name())))
        }
        (_, Some(e)) => return Err(parse_error(e.line, format!("key `target` does not apply to {}", kind.name()))),
        (_, None) => None,
    };
    if kind != JobKind::Sweep && fields.has_section("sweep") {
        let e = fields.keys_in("sweep")[0];
        return Err(parse_error(e.line, format!("[sweep] keys do not apply to {}", kind.name())));
    }

    if kind == JobKind::Verify {
        let e = fields.require("job", "check", "verify")?;
        let check = Check::from_name(&e.value).ok_or_else(|| parse_error(e.line, format!("unknown check `{}`", e.value)))?;
        if let Some(e) = fields.keys_in("model").first() {
            return Err(parse_error(e.line, "verify checks fix their own models; remove [model]"));
        }
        reject_keys(&fields, "render", &["c", "window", "box"], "verify")?;
        let rank = check.rank();
        let resolution = parse_resolution(&fields, rank, check.default_resolution())?;
        return Ok(JobSpec {
            id,
            kind,
            target: None,
            check: Some(check),
            seed,
            model: None,
            parameter: Vec::new(),
            window: None,
            bbox: None,
            resolution,
            iterations: iterations(&fields, check.default_iterations())?,
            radius,
            connectivity: connectivity(&fields, rank)?,
            tolerance,
            sweep: Vec::new(),
            output_dir,
        });
    }
    if let Some(e) = fields.get("job", "check") {
        return Err(parse_error(e.line, format!("key `check` does not apply to {}", kind.name())));
    }

    let set = match kind {
        JobKind::Render(set) => set,
        _ => target.expect("set above"),
    };
    let model = parse_model(&fields)?;
    let planar = is_planar(set);
    if !planar && model.nodes() != 3 {
        return Err(parse_error(
            fields.get("model", "model").map_or(0, |e| e.line),
            format!("{} renders need a 3-node model, got {} nodes", set.name(), model.nodes()),
        ));
    }
    let parameter = parse_parameter(&fields, set)?;
    if parameter.len() > 1 && parameter.len() != model.nodes() {
        let e = fields.get("render", "c").expect("present");
        return Err(parse_error(
            e.line,
            format!("c has {} entries; use 1 or {}", parameter.len(), model.nodes()),
        ));
    }
    let (window, bbox) = parse_region(&fields, set)?;
    let rank = if planar { 2 } else { 3 };
    let resolution = parse_resolution(&fields, rank, if planar { 600 } else { 200 })?;
    let default_budget = if planar { DEFAULT_COMPLEX_BUDGET } else { DEFAULT_REAL_BUDGET };
    let sweep = if kind == JobKind::Sweep {
        let axes = parse_sweep(&fields, &model, set)?;
        if axes.is_empty() {
            return Err(parse_error(0, "sweep jobs need at least one [sweep] axis"));
        }
        axes
    } else {
        Vec::new()
    };
    Ok(JobSpec {
        id,
        kind,
        target,
        check: None,
        seed,
        model: Some(model),
        parameter,
        window,
        bbox,
        resolution,
        iterations: iterations(&fields, default_budget)?,
        radius,
        connectivity: connectivity(&fields, rank)?,
        tolerance,
        sweep,
        output_dir,
    })
}

fn iterations(fields: &Fields, default: u32) -> Result<u32> {
    let value = fields.uint::<u32>("render", "iterations")?.unwrap_or(default);
    if value == 0 {
        let e = fields.get("render", "iterations").expect("non-default");
        return Err(parse_error(e.line, "iterations must be at least 1"));
    }
    Ok(value)
}

fn connectivity(fields: &Fields, rank: usize) -> Result<Connectivity> {
    match fields.get("render", "connectivity") {
        None => Ok(Connectivity::default_for(rank)),
        Some(e) => {
            let code = e.value.parse::<u32>().map_err(|_| malformed(e, "4, 8, 6 or 26"))?;
            Connectivity::from_code(code, rank).map_err(|err| parse_error(e.line, err.to_string()))
        }
    }
}

/// Expands a sweep into one render job per grid point, outer axis first.
pub fn expand_sweep(spec: &JobSpec) -> Result<Vec<JobSpec>> {
    let target = spec
        .set_kind()
        .filter(|_| spec.kind == JobKind::Sweep)
        .ok_or_else(|| Error::domain(format!("job {} is not a sweep", spec.id)))?;
    let total: usize = spec.sweep.iter().map(|axis| axis.values.len()).product();
    let mut jobs = Vec::with_capacity(total);
    for index in 0..total {
        let mut job = spec.clone();
        job.kind = JobKind::Render(target);
        job.target = None;
        job.sweep = Vec::new();
        job.id = format!("{}-{index:03}", spec.id);
        let mut rest = index;
        let mut picks = vec![0; spec.sweep.len()];
        for (slot, axis) in spec.sweep.iter().enumerate().rev() {
            picks[slot] = rest % axis.values.len();
            rest /= axis.values.len();
        }
        for (axis, &pick) in spec.sweep.iter().zip(&picks) {
            set_param(&mut job, axis.param, axis.values[pick])?;
        }
        jobs.push(job);
    }
    Ok(jobs)
}

fn set_param(job: &mut JobSpec, param: SweepParam, value: Complex64) -> Result<()> {
    let model = job.model.as_mut().ok_or_else(|| Error::domain("sweep without a model"))?;
    match (param, model) {
        (SweepParam::A, ModelSpec::Named(ModelKind::SimpleDual { a }))
        | (SweepParam::A, ModelSpec::Named(ModelKind::SelfDrive { a, .. }))
        | (SweepParam::A, ModelSpec::Named(ModelKind::Feedback { a, .. }))
        | (SweepParam::B, ModelSpec::Named(ModelKind::SelfDrive { b: a, .. }))
        | (SweepParam::B, ModelSpec::Named(ModelKind::Feedback { b: a, .. }))
        | (SweepParam::F, ModelSpec::Named(ModelKind::Feedback { f: a, .. })) => *a = value.re,
        (SweepParam::G, ModelSpec::Bipartite { g, .. }) | (SweepParam::G, ModelSpec::BipartiteRandom { g, .. }) => {
            *g = BlockWeights::balanced(value.re)
        }
        (SweepParam::C, _) => job.parameter = vec![value],
        (param, model) => {
            return Err(Error::domain(format!(
                "sweep axis {} does not apply to model {}",
                param.name(),
                model.name()
            )))
        }
    }
    Ok(())
}

/// Formats with 17 significant digits, enough to round-trip every `f64`.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        return format_real(z.re);
    }
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{sign}{}i", format_real(z.re), format_real(z.im.abs()))
}

fn join<T>(items: &[T], fmt: impl Fn(&T) -> String) -> String {
    items.iter().map(fmt).collect::<Vec<_>>().join(", ")
}

fn block_text(block: &AdjacencyBlock) -> String {
    join(block.cells(), |&on| if on { "1".into() } else { "0".into() })
}

/// Writes a config that [`parse_config`] reads back to an equal spec.
pub fn serialize_config(spec: &JobSpec) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "[job]\nid = {}\nkind = {}", spec.id, spec.kind.name());
    if let Some(target) = spec.target {
        let _ = writeln!(out, "target = {}", target.name());
    }
    if let Some(check) = spec.check {
        let _ = writeln!(out, "check = {}", check.name());
    }
    let _ = writeln!(out, "seed = {}", spec.seed);

    if let Some(model) = &spec.model {
        let _ = writeln!(out, "\n[model]\nmodel = {}", model.name());
        let g_lines = |out: &mut String, g: &BlockWeights| {
            let _ = writeln!(
                out,
                "gxx = {}\ngxy = {}\ngyx = {}\ngyy = {}",
                format_real(g.xx),
                format_real(g.xy),
                format_real(g.yx),
                format_real(g.yy)
            );
        };
        match model {
            ModelSpec::Named(ModelKind::General(w)) => {
                let _ = writeln!(out, "nodes = {}\nweights = {}", w.order(), join(w.entries(), |&x| format_real(x)));
            }
            ModelSpec::Named(_) => {
                let (a, b, f) = model.couplings();
                for (key, value) in [("a", a), ("b", b), ("f", f)] {
                    if let Some(v) = value {
                        let _ = writeln!(out, "{key} = {}", format_real(v));
                    }
                }
            }
            ModelSpec::Bipartite {
                clique,
                x_to_y,
                y_to_x,
                g,
            } => {
                let _ = writeln!(
                    out,
                    "half = {}\nclique = {}\na1 = {}\na2 = {}",
                    clique.size(),
                    block_text(clique),
                    block_text(x_to_y),
                    block_text(y_to_x)
                );
                g_lines(&mut out, g);
            }
            ModelSpec::BipartiteRandom {
                half,
                x_to_y,
                y_to_x,
                g,
            } => {
                let _ = writeln!(out, "half = {half}\nnxy = {x_to_y}\nnyx = {y_to_x}");
                g_lines(&mut out, g);
            }
        }
    }

    out.push_str("\n[render]\n");
    if !spec.parameter.is_empty() {
        let _ = writeln!(out, "c = {}", join(&spec.parameter, |&z| format_complex(z)));
    }
    if let Some(w) = &spec.window {
        let _ = writeln!(out, "window = {}", join(w, |&x| format_real(x)));
    }
    if let Some(b) = &spec.bbox {
        let _ = writeln!(out, "box = {}", join(b, |&x| format_real(x)));
    }
    let _ = writeln!(
        out,
        "resolution = {}\niterations = {}\nradius = {}\nconnectivity = {}\ntolerance = {}",
        join(&spec.resolution, |r| r.to_string()),
        spec.iterations,
        format_real(spec.radius),
        spec.connectivity.code(),
        format_real(spec.tolerance)
    );

    if !spec.sweep.is_empty() {
        out.push_str("\n[sweep]\n");
        for axis in &spec.sweep {
            let text = match axis.param {
                SweepParam::C => join(&axis.values, |&z| format_complex(z)),
                _ => join(&axis.values, |z| format_real(z.re)),
            };
            let _ = writeln!(out, "{} = {}", axis.param.name(), text);
        }
    }
    let _ = writeln!(out, "\n[output]\ndir = {}", spec.output_dir.display());
    out
}
