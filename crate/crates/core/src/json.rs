//! JSON bundles: one self-describing document holding a group, named systems,
//! channels, graphs and sources.
//!
//! Complex scalars are `[re, im]` pairs (a bare number is read as real).
//! Matrices are arrays of rows. Factor-pair keys are `"i,j"` with 0-based
//! indices; missing pairs are zero. Objects are written with sorted keys, so
//! the same bundle always serializes to the same bytes.
//!
//! ```json
//! {
//!   "group": {"order": 2, "mult_table": [[0, 1], [1, 0]], "identity": 0},
//!   "systems": {"A": {"factors": [1, 1], "action": {"perms": {"1": [1, 0]}}}},
//!   "channels": {"N": {"from": "A", "to": "A", "stochastic": [[0.5, 0.5], [0.5, 0.5]]}},
//!   "graphs": {"G": {"system": "A", "kind": "confusability",
//!                    "blocks": {"0,0": {"projection": [[1]]}, "1,1": {"projection": [[1]]}}}},
//!   "sources": {}
//! }
//! ```

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::classical::{embed_channel, StochasticMatrix};
use crate::cpmaps::{CpMorphism, KrausFamily};
use crate::error::{Error, Result};
use crate::graphs::QuantumGraph;
use crate::groups::{is_covariant_cp, AlgebraAction, FiniteGroup};
use crate::linalg::{eye, orthonormal_span, vec, ComplexMatrix, Projection, Tol};
use crate::relations::QuantumRelation;
use crate::scc::{tensor_system, Source};
use crate::systems::{QuantumSet, System};

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

fn field<'a>(v: &'a Value, key: &str, what: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| bad(format!("{}: missing \"{}\"", what, key)))
}

fn as_object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| bad(format!("{}: expected an object", what)))
}

fn as_array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| bad(format!("{}: expected an array", what)))
}

fn as_str<'a>(v: &'a Value, what: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| bad(format!("{}: expected a string", what)))
}

fn as_usize(v: &Value, what: &str) -> Result<usize> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| bad(format!("{}: expected a non-negative integer", what)))
}

fn as_f64(v: &Value, what: &str) -> Result<f64> {
    v.as_f64().ok_or_else(|| bad(format!("{}: expected a number", what)))
}

fn usize_list(v: &Value, what: &str) -> Result<Vec<usize>> {
    as_array(v, what)?.iter().map(|x| as_usize(x, what)).collect()
}

pub fn complex_to_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn complex_from_json(v: &Value, what: &str) -> Result<Complex64> {
    if let Some(x) = v.as_f64() {
        return Ok(Complex64::new(x, 0.0));
    }
    match v.as_array().map(|a| a.as_slice()) {
        Some([re, im]) => Ok(Complex64::new(as_f64(re, what)?, as_f64(im, what)?)),
        _ => Err(bad(format!("{}: complex scalars are [re, im]", what))),
    }
}

pub fn matrix_to_json(m: &ComplexMatrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|r| Value::Array((0..m.ncols()).map(|c| complex_to_json(m[(r, c)])).collect()))
            .collect(),
    )
}

pub fn matrix_from_json(v: &Value, what: &str) -> Result<ComplexMatrix> {
    let rows = as_array(v, what)?;
    let n = rows.len();
    let m = rows.first().map_or(Ok(0), |r| as_array(r, what).map(|r| r.len()))?;
    let mut out = ComplexMatrix::zeros(n, m);
    for (r, row) in rows.iter().enumerate() {
        let row = as_array(row, what)?;
        if row.len() != m {
            return Err(bad(format!("{}: ragged matrix", what)));
        }
        for (c, z) in row.iter().enumerate() {
            out[(r, c)] = complex_from_json(z, what)?;
        }
    }
    Ok(out)
}

fn pair_key(i: usize, j: usize) -> String {
    format!("{},{}", i, j)
}

/// Parses `"i,j"` and checks both indices against the factor counts.
fn parse_pair(key: &str, ni: usize, nj: usize, what: &str) -> Result<(usize, usize)> {
    let parsed = key.split_once(',').and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)));
    match parsed {
        Some((i, j)) if i < ni && j < nj => Ok((i, j)),
        Some(_) => Err(Error::IndexOutOfRange(format!("{}: pair \"{}\" outside {}x{} factors", what, key, ni, nj))),
        None => Err(bad(format!("{}: pair keys look like \"0,1\", got \"{}\"", what, key))),
    }
}

pub fn group_to_json(g: &FiniteGroup) -> Value {
    json!({"order": g.order(), "mult_table": g.table(), "identity": g.identity()})
}

pub fn group_from_json(v: &Value) -> Result<FiniteGroup> {
    let table: Vec<Vec<usize>> = as_array(field(v, "mult_table", "group")?, "group.mult_table")?
        .iter()
        .map(|r| usize_list(r, "group.mult_table"))
        .collect::<Result<_>>()?;
    if let Some(order) = v.get("order") {
        if as_usize(order, "group.order")? != table.len() {
            return Err(Error::InvalidGroup("order does not match the table size".into()));
        }
    }
    let identity = match v.get("identity") {
        Some(e) => as_usize(e, "group.identity")?,
        None => 0,
    };
    FiniteGroup::new(table, identity)
}

/// `{"factors", "weights", "action"}`; the action lists only non-identity data.
pub fn system_to_json(sys: &System) -> Value {
    let a = sys.action();
    let mut perms = Map::new();
    let mut unitaries = Map::new();
    for g in 0..a.group().order() {
        let p = a.perm(g);
        if p.iter().enumerate().any(|(i, &t)| i != t) {
            perms.insert(g.to_string(), json!(p));
        }
        let us: Vec<&ComplexMatrix> = (0..sys.n_factors()).map(|i| a.unitary(g, i)).collect();
        if us.iter().any(|u| *u != &eye(u.nrows())) {
            unitaries.insert(g.to_string(), Value::Array(us.into_iter().map(matrix_to_json).collect()));
        }
    }
    let mut out = json!({"factors": sys.dims(), "weights": sys.weights()});
    if !perms.is_empty() || !unitaries.is_empty() {
        out["action"] = json!({"perms": perms, "unitaries": unitaries});
    }
    out
}

pub fn system_from_json(v: &Value, group: &Arc<FiniteGroup>, what: &str) -> Result<System> {
    let dims = usize_list(field(v, "factors", what)?, what)?;
    let qset = QuantumSet::new(dims.clone())?;
    let n = group.order();
    let mut perms: Vec<Vec<usize>> = vec![(0..dims.len()).collect(); n];
    let mut unitaries: Vec<Vec<ComplexMatrix>> = vec![dims.iter().map(|&d| eye(d)).collect(); n];
    if let Some(action) = v.get("action") {
        let read_g = |key: &str| -> Result<usize> {
            key.parse::<usize>()
                .ok()
                .filter(|&g| g < n)
                .ok_or_else(|| Error::InvalidAction(format!("{}: \"{}\" is not a group element", what, key)))
        };
        if let Some(p) = action.get("perms") {
            for (key, list) in as_object(p, what)? {
                perms[read_g(key)?] = usize_list(list, what)?;
            }
        }
        if let Some(u) = action.get("unitaries") {
            for (key, list) in as_object(u, what)? {
                unitaries[read_g(key)?] =
                    as_array(list, what)?.iter().map(|m| matrix_from_json(m, what)).collect::<Result<_>>()?;
            }
        }
    }
    let action = if v.get("action").is_none() {
        AlgebraAction::trivial(group.clone(), &dims)
    } else {
        AlgebraAction::new(group.clone(), &dims, perms, unitaries, 1e-8)?
    };
    match v.get("weights") {
        Some(w) => {
            let weights = as_array(w, what)?.iter().map(|x| as_f64(x, what)).collect::<Result<_>>()?;
            System::with_weights(qset, action, weights)
        }
        None => System::separable_standard(qset, action),
    }
}

/// Channel as `{"from", "to", "choi"}`; Choi data is lossless, unlike a
/// truncated Kraus family.
pub fn channel_to_json(f: &CpMorphism, from: &str, to: &str) -> Value {
    let nb = f.target().n_factors();
    let mut choi = Map::new();
    for (idx, b) in f.choi_blocks().iter().enumerate() {
        if b.iter().any(|z| z.norm() > 0.0) {
            choi.insert(pair_key(idx / nb, idx % nb), matrix_to_json(b));
        }
    }
    json!({"from": from, "to": to, "choi": choi})
}

/// Reads `"kraus"`, `"choi"` or `"stochastic"` data between two given systems.
pub fn cp_from_json(v: &Value, src: &System, tgt: &System, tol: Tol, what: &str) -> Result<CpMorphism> {
    let (na, nb) = (src.n_factors(), tgt.n_factors());
    if let Some(k) = v.get("kraus") {
        let mut fam = KrausFamily::new(na, nb);
        for (key, list) in as_object(k, what)? {
            let (i, j) = parse_pair(key, na, nb, what)?;
            for m in as_array(list, what)? {
                fam.push(i, j, matrix_from_json(m, what)?);
            }
        }
        CpMorphism::from_kraus(&fam, src.clone(), tgt.clone())
    } else if let Some(c) = v.get("choi") {
        let mut blocks: Vec<ComplexMatrix> = (0..na * nb)
            .map(|idx| {
                let n = src.dim(idx / nb) * tgt.dim(idx % nb);
                ComplexMatrix::zeros(n, n)
            })
            .collect();
        for (key, m) in as_object(c, what)? {
            let (i, j) = parse_pair(key, na, nb, what)?;
            blocks[i * nb + j] = matrix_from_json(m, what)?;
        }
        CpMorphism::from_choi(src.clone(), tgt.clone(), blocks, tol.spec)
    } else if let Some(s) = v.get("stochastic") {
        let rows: Vec<Vec<f64>> = as_array(s, what)?
            .iter()
            .map(|r| as_array(r, what)?.iter().map(|x| as_f64(x, what)).collect())
            .collect::<Result<_>>()?;
        let p = StochasticMatrix::new(rows)?;
        if p.n_inputs() != na || p.n_outputs() != nb || !src.is_commutative() || !tgt.is_commutative() {
            return Err(Error::ShapeMismatch(format!(
                "{}: a stochastic matrix needs classical systems with {} inputs and {} outputs",
                what,
                p.n_inputs(),
                p.n_outputs()
            )));
        }
        embed_channel(&p).with_systems(src.clone(), tgt.clone())
    } else {
        Err(bad(format!("{}: expected \"kraus\", \"choi\" or \"stochastic\"", what)))
    }
}

fn kind_of(g: &QuantumGraph, tol: Tol) -> &'static str {
    let class = g.classify(tol);
    if class.is_confusability {
        "confusability"
    } else if class.is_simple {
        "simple"
    } else {
        "general"
    }
}

/// Graph as `{"system", "kind", "blocks"}` with nonzero projections only.
pub fn graph_to_json(g: &QuantumGraph, system: &str, tol: Tol) -> Value {
    let n = g.system().n_factors();
    let mut blocks = Map::new();
    for (idx, p) in g.relation().blocks().iter().enumerate() {
        if p.rank() > 0 {
            blocks.insert(pair_key(idx / n, idx % n), json!({"projection": matrix_to_json(p.matrix())}));
        }
    }
    json!({"system": system, "kind": kind_of(g, tol), "blocks": blocks})
}

/// Relation blocks given as `{"projection": P}`, `{"basis": [...]}` (operators
/// `K_j → Hᵢ`, the stored orientation) or `{"physical": [...]}` (operators `Hᵢ → K_j`).
pub fn relation_from_json(v: &Value, src: &System, tgt: &System, tol: Tol, what: &str) -> Result<QuantumRelation> {
    let (na, nb) = (src.n_factors(), tgt.n_factors());
    let mut blocks: Vec<Projection> = (0..na * nb).map(|idx| Projection::zero(src.dim(idx / nb) * tgt.dim(idx % nb))).collect();
    if let Some(b) = v.get("blocks") {
        for (key, entry) in as_object(b, what)? {
            let (i, j) = parse_pair(key, na, nb, what)?;
            let (d, e) = (src.dim(i), tgt.dim(j));
            let span = |list: &Value, adjoint: bool| -> Result<Projection> {
                let mut vs = Vec::new();
                for m in as_array(list, what)? {
                    let m = matrix_from_json(m, what)?;
                    let m = if adjoint { m.adjoint() } else { m };
                    if m.nrows() != d || m.ncols() != e {
                        return Err(Error::ShapeMismatch(format!("{}: block {} operators have the wrong shape", what, key)));
                    }
                    vs.push(vec(&m));
                }
                orthonormal_span(&vs, d * e, tol.spec)
            };
            blocks[i * nb + j] = if let Some(p) = entry.get("projection") {
                Projection::new(matrix_from_json(p, what)?, tol.proj)?
            } else if let Some(list) = entry.get("basis") {
                span(list, false)?
            } else if let Some(list) = entry.get("physical") {
                span(list, true)?
            } else {
                return Err(bad(format!("{}: block {} needs \"projection\", \"basis\" or \"physical\"", what, key)));
            };
        }
    }
    QuantumRelation::new(src.clone(), tgt.clone(), blocks)
}

pub fn graph_from_json(v: &Value, sys: &System, tol: Tol, what: &str) -> Result<QuantumGraph> {
    let g = QuantumGraph::new(relation_from_json(v, sys, sys, tol, what)?, tol)?;
    if let Some(kind) = v.get("kind") {
        let class = g.classify(tol);
        match as_str(kind, what)? {
            "confusability" if !class.is_confusability => return Err(Error::NotConfusability),
            "simple" if !class.is_simple => return Err(Error::NotSimple),
            "confusability" | "simple" | "general" => {}
            other => return Err(bad(format!("{}: unknown graph kind \"{}\"", what, other))),
        }
    }
    Ok(g)
}

#[derive(Debug, Clone)]
pub struct NamedChannel {
    pub from: String,
    pub to: String,
    pub morphism: CpMorphism,
    /// Declared covariant; only declared channels are checked on load.
    pub covariant: bool,
}

#[derive(Debug, Clone)]
pub struct NamedGraph {
    pub system: String,
    pub graph: QuantumGraph,
}

#[derive(Debug, Clone)]
pub struct NamedSource {
    pub s: String,
    pub oa: String,
    pub ob: String,
    pub source: Source,
}

/// A resolved bundle. Every cross-reference has been checked on load and,
/// when the group is nontrivial, every channel not marked
/// `"covariant": false` has been checked to be covariant.
#[derive(Debug, Clone)]
pub struct Bundle {
    pub group: Arc<FiniteGroup>,
    pub systems: BTreeMap<String, System>,
    pub channels: BTreeMap<String, NamedChannel>,
    pub graphs: BTreeMap<String, NamedGraph>,
    pub sources: BTreeMap<String, NamedSource>,
}

impl Bundle {
    pub fn new(group: Arc<FiniteGroup>) -> Self {
        Bundle {
            group,
            systems: BTreeMap::new(),
            channels: BTreeMap::new(),
            graphs: BTreeMap::new(),
            sources: BTreeMap::new(),
        }
    }

    pub fn parse(text: &str, tol: Tol) -> Result<Self> {
        Bundle::from_json(&serde_json::from_str(text)?, tol)
    }

    pub fn from_json(v: &Value, tol: Tol) -> Result<Self> {
        as_object(v, "bundle")?;
        let group = Arc::new(match v.get("group") {
            Some(g) => group_from_json(g)?,
            None => FiniteGroup::trivial(),
        });
        let mut b = Bundle::new(group);
        let section = |key: &str| -> Result<Map<String, Value>> {
            Ok(v.get(key).map(|s| as_object(s, key).cloned()).transpose()?.unwrap_or_default())
        };
        for (name, s) in section("systems")? {
            let sys = system_from_json(&s, &b.group, &format!("system {}", name))?;
            b.systems.insert(name, sys);
        }
        for (name, c) in section("channels")? {
            let what = format!("channel {}", name);
            let from = as_str(field(&c, "from", &what)?, &what)?.to_string();
            let to = as_str(field(&c, "to", &what)?, &what)?.to_string();
            let f = cp_from_json(&c, b.system(&from)?, b.system(&to)?, tol, &what)?;
            let covariant = match c.get("covariant") {
                Some(flag) => flag.as_bool().ok_or_else(|| bad(format!("{}: \"covariant\" must be a boolean", what)))?,
                None => true,
            };
            if covariant && !b.group.is_trivial() && !is_covariant_cp(&f, tol.proj)? {
                return Err(Error::NotCovariant(what));
            }
            b.channels.insert(name, NamedChannel { from, to, morphism: f, covariant });
        }
        for (name, g) in section("graphs")? {
            let what = format!("graph {}", name);
            let system = as_str(field(&g, "system", &what)?, &what)?.to_string();
            let graph = graph_from_json(&g, b.system(&system)?, tol, &what)?;
            b.graphs.insert(name, NamedGraph { system, graph });
        }
        for (name, s) in section("sources")? {
            let what = format!("source {}", name);
            let names: Vec<String> = ["s", "oa", "ob"]
                .iter()
                .map(|k| Ok(as_str(field(&s, k, &what)?, &what)?.to_string()))
                .collect::<Result<_>>()?;
            let (ss, oa, ob) = (b.system(&names[0])?, b.system(&names[1])?, b.system(&names[2])?);
            let joint = tensor_system(oa, ob)?;
            let channel = match s.get("channel") {
                Some(c) => b.channel(as_str(c, &what)?)?.morphism.with_systems(ss.clone(), joint.product().clone())?,
                None => cp_from_json(&s, ss, joint.product(), tol, &what)?,
            };
            let source = Source::new(ss.clone(), oa.clone(), ob.clone(), channel, tol)?;
            let [s, oa, ob]: [String; 3] = names.try_into().expect("three names");
            b.sources.insert(name, NamedSource { s, oa, ob, source });
        }
        Ok(b)
    }

    pub fn to_json(&self, tol: Tol) -> Value {
        let mut out = Map::new();
        if !self.group.is_trivial() {
            out.insert("group".into(), group_to_json(&self.group));
        }
        let systems: Map<String, Value> = self.systems.iter().map(|(k, s)| (k.clone(), system_to_json(s))).collect();
        let channels: Map<String, Value> = self
            .channels
            .iter()
            .map(|(k, c)| {
                let mut v = channel_to_json(&c.morphism, &c.from, &c.to);
                if !c.covariant {
                    v["covariant"] = json!(false);
                }
                (k.clone(), v)
            })
            .collect();
        let graphs: Map<String, Value> =
            self.graphs.iter().map(|(k, g)| (k.clone(), graph_to_json(&g.graph, &g.system, tol))).collect();
        let sources: Map<String, Value> = self
            .sources
            .iter()
            .map(|(k, s)| {
                let mut v = channel_to_json(s.source.channel(), "", "");
                let obj = v.as_object_mut().expect("object");
                obj.remove("from");
                obj.remove("to");
                obj.insert("s".into(), json!(s.s));
                obj.insert("oa".into(), json!(s.oa));
                obj.insert("ob".into(), json!(s.ob));
                (k.clone(), v)
            })
            .collect();
        out.insert("systems".into(), Value::Object(systems));
        out.insert("channels".into(), Value::Object(channels));
        out.insert("graphs".into(), Value::Object(graphs));
        out.insert("sources".into(), Value::Object(sources));
        Value::Object(out)
    }

    pub fn system(&self, name: &str) -> Result<&System> {
        self.systems.get(name).ok_or_else(|| bad(format!("unknown system \"{}\"", name)))
    }

    pub fn channel(&self, name: &str) -> Result<&NamedChannel> {
        self.channels.get(name).ok_or_else(|| bad(format!("unknown channel \"{}\"", name)))
    }

    pub fn graph(&self, name: &str) -> Result<&NamedGraph> {
        self.graphs.get(name).ok_or_else(|| bad(format!("unknown graph \"{}\"", name)))
    }

    pub fn source(&self, name: &str) -> Result<&NamedSource> {
        self.sources.get(name).ok_or_else(|| bad(format!("unknown source \"{}\"", name)))
    }

    /// Name of a registered system equal to `sys`, or a fresh `base`-derived name after registering it.
    pub fn intern_system(&mut self, sys: &System, base: &str) -> String {
        if let Some((k, _)) = self.systems.iter().find(|(_, s)| *s == sys) {
            return k.clone();
        }
        let mut name = base.to_string();
        let mut k = 1;
        while self.systems.contains_key(&name) {
            k += 1;
            name = format!("{}{}", base, k);
        }
        self.systems.insert(name.clone(), sys.clone());
        name
    }
}

/// Indented JSON with a trailing newline; objects are spread over lines,
/// arrays (rows, matrices, index lists) stay on one line.
pub fn to_pretty(v: &Value) -> String {
    let mut out = String::new();
    write_pretty(v, 0, &mut out);
    out.push('\n');
    out
}

fn write_pretty(v: &Value, depth: usize, out: &mut String) {
    match v {
        Value::Object(map) if !map.is_empty() => {
            out.push_str("{\n");
            for (k, (key, val)) in map.iter().enumerate() {
                out.push_str(&"  ".repeat(depth + 1));
                out.push_str(&Value::String(key.clone()).to_string());
                out.push_str(": ");
                write_pretty(val, depth + 1, out);
                out.push_str(if k + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&"  ".repeat(depth));
            out.push('}');
        }
        other => out.push_str(&other.to_string()),
    }
}
