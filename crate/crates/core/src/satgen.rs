//! CNF encodings of fixed-palette avoidance problems.
//!
//! Variable `x(S, c)` is true when subset `S` gets color `c`; its id is
//! `position(S) · k + c + 1` with positions in graded-colex order.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::colorings::{self, Coloring};
use crate::embedding;
use crate::lattice::Lattice;
use crate::posets::Poset;
use crate::{domain, invalid, Error, Result};

pub const MAX_SAT_GROUND: u32 = 8;
pub const MAX_SAT_COLORS: usize = 4;
/// Copies enumerated per pattern before giving up.
pub const MAX_COPIES: usize = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfInstance {
    pub n: u32,
    pub k: usize,
    pub patterns: Vec<Poset>,
    pub num_vars: u32,
    pub clauses: Vec<Vec<i32>>,
}

/// Sidecar describing the variables: `[subset mask, color, variable]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sidecar {
    pub n: u32,
    pub k: usize,
    pub varmap: Vec<[u32; 3]>,
    #[serde(default)]
    pub patterns: Vec<Poset>,
}

impl CnfInstance {
    pub fn var(&self, position: usize, color: usize) -> i32 {
        (position * self.k + color + 1) as i32
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for clause in &self.clauses {
            for lit in clause {
                write!(out, "{lit} ").unwrap();
            }
            out.push_str("0\n");
        }
        out
    }

    pub fn sidecar(&self) -> Sidecar {
        let lattice = Lattice::new(self.n).expect("validated ground size");
        let varmap = lattice
            .subsets()
            .iter()
            .enumerate()
            .flat_map(|(pos, s)| (0..self.k).map(move |c| [s.0, c as u32, (pos * self.k + c + 1) as u32]))
            .collect();
        Sidecar { n: self.n, k: self.k, varmap, patterns: self.patterns.clone() }
    }

    /// Rebuilds the variable layout from a sidecar, without clauses.
    pub fn from_sidecar(sidecar: &Sidecar) -> Result<CnfInstance> {
        let lattice = Lattice::new(sidecar.n)?;
        let expected = lattice.len() * sidecar.k;
        if sidecar.varmap.len() != expected {
            return invalid(format!("sidecar lists {} variables, expected {expected}", sidecar.varmap.len()));
        }
        for &[mask, color, var] in &sidecar.varmap {
            let pos = lattice.position(crate::lattice::Subset(mask));
            if var as usize != pos * sidecar.k + color as usize + 1 {
                return invalid(format!("sidecar variable {var} does not follow the layout"));
            }
        }
        Ok(CnfInstance {
            n: sidecar.n,
            k: sidecar.k,
            patterns: sidecar.patterns.clone(),
            num_vars: expected as u32,
            clauses: vec![],
        })
    }
}

/// Satisfiable iff some coloring of `B_n` with `patterns.len()` colors has
/// no copy of `patterns[c]` in color `c`.
pub fn encode(n: u32, patterns: &[Poset]) -> Result<CnfInstance> {
    let k = patterns.len();
    if n > MAX_SAT_GROUND {
        return domain(format!("CNF export is capped at n = {MAX_SAT_GROUND}, got {n}"));
    }
    if k == 0 || k > MAX_SAT_COLORS {
        return domain(format!("CNF export needs 1 to {MAX_SAT_COLORS} colors, got {k}"));
    }
    let lattice = Lattice::new(n)?;
    let size = lattice.len();
    let var = |pos: usize, c: usize| (pos * k + c + 1) as i32;
    let mut clauses = Vec::new();
    for pos in 0..size {
        clauses.push((0..k).map(|c| var(pos, c)).collect());
        for a in 0..k {
            for b in a + 1..k {
                clauses.push(vec![-var(pos, a), -var(pos, b)]);
            }
        }
    }
    if patterns.iter().all(|p| *p == patterns[0]) {
        clauses.push(vec![var(0, 0)]);
    }
    let mut cache: Vec<(&Poset, Vec<Vec<crate::lattice::Subset>>)> = Vec::new();
    for (c, p) in patterns.iter().enumerate() {
        if !cache.iter().any(|(q, _)| *q == p) {
            cache.push((p, embedding::all_copies(lattice.subsets(), p, MAX_COPIES)?));
        }
        let copies = &cache.iter().find(|(q, _)| *q == p).unwrap().1;
        for copy in copies {
            clauses.push(copy.iter().map(|&s| -var(lattice.position(s), c)).collect());
        }
    }
    Ok(CnfInstance { n, k, patterns: patterns.to_vec(), num_vars: (size * k) as u32, clauses })
}

/// Reads the literals of a solver model: DIMACS `v` lines, or bare
/// whitespace-separated integers. A trailing `0` is ignored.
pub fn parse_model(text: &str) -> Result<Vec<i32>> {
    let mut lits = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('s') {
            continue;
        }
        let body = line.strip_prefix('v').unwrap_or(line);
        for tok in body.split_whitespace() {
            let lit: i32 = tok.parse().map_err(|_| Error::Invalid(format!("bad literal {tok:?}")))?;
            if lit != 0 {
                lits.push(lit);
            }
        }
    }
    Ok(lits)
}

/// The coloring a model describes, checked against the instance patterns.
pub fn decode(model: &[i32], instance: &CnfInstance) -> Result<Coloring> {
    let mut value = vec![None; instance.num_vars as usize + 1];
    for &lit in model {
        let v = lit.unsigned_abs() as usize;
        if v == 0 || v > instance.num_vars as usize {
            return invalid(format!("literal {lit} is outside the instance"));
        }
        value[v] = Some(lit > 0);
    }
    if let Some(v) = (1..value.len()).find(|&v| value[v].is_none()) {
        return invalid(format!("model leaves variable {v} unassigned"));
    }
    let lattice = Lattice::new(instance.n)?;
    let mut colors = Vec::with_capacity(lattice.len());
    for pos in 0..lattice.len() {
        let on: Vec<usize> = (0..instance.k).filter(|&c| value[instance.var(pos, c) as usize] == Some(true)).collect();
        match on[..] {
            [c] => colors.push(c as u32),
            _ => {
                return invalid(format!(
                    "subset {} has {} colors in the model",
                    lattice.at(pos),
                    on.len()
                ))
            }
        }
    }
    let coloring = Coloring::new(instance.n, colors)?;
    if !instance.patterns.is_empty() {
        let report = colorings::verify_palette(&coloring, &instance.patterns)?;
        if let Some((c, e)) = report.mono_witness {
            return Err(Error::Verification(format!(
                "decoded coloring has a copy of {} in color {c} at {:?}",
                instance.patterns[c], e.images
            )));
        }
    }
    Ok(coloring)
}

/// The model a coloring induces, as positive and negative literals.
pub fn model_of(coloring: &Coloring, instance: &CnfInstance) -> Vec<i32> {
    let lattice = Lattice::new(instance.n).expect("validated ground size");
    let mut lits = Vec::new();
    for (pos, &s) in lattice.subsets().iter().enumerate() {
        for c in 0..instance.k {
            let v = instance.var(pos, c);
            lits.push(if coloring.color(s) as usize == c { v } else { -v });
        }
    }
    lits
}
