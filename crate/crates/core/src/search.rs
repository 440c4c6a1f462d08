//! Exact avoidability decisions by canonical backtracking.
//!
//! Subsets are colored in graded-colex order. In rainbow mode, and in fixed
//! palette mode when all patterns agree, colorings are enumerated as
//! restricted growth strings so each set partition is visited once. After
//! every assignment only the copies through the newest set are checked; the
//! newest set is never below an earlier one, which keeps the checks local.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::colorings::Coloring;
use crate::embedding;
use crate::lattice::{Lattice, Subset};
use crate::posets::Poset;
use crate::{domain, matching, Result};

/// Default node budget.
pub const DEFAULT_BUDGET: u64 = 100_000_000;
/// Largest ground size the search accepts.
pub const MAX_SEARCH_GROUND: u32 = 7;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Mode {
    /// `k = patterns.len()` colors; color `i` must avoid `patterns[i]`.
    FixedPalette { patterns: Vec<Poset> },
    /// Any palette; avoid a monochromatic `P ∈ ps` and a rainbow `Q ∈ qs`.
    Rainbow { ps: Vec<Poset>, qs: Vec<Poset> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AvoidanceProblem {
    pub n: u32,
    pub mode: Mode,
    pub budget: u64,
}

impl AvoidanceProblem {
    pub fn fixed_palette(n: u32, patterns: Vec<Poset>) -> Result<AvoidanceProblem> {
        if patterns.is_empty() {
            return domain("a fixed palette needs at least one color");
        }
        AvoidanceProblem::checked(n, Mode::FixedPalette { patterns })
    }

    pub fn rainbow(n: u32, ps: Vec<Poset>, qs: Vec<Poset>) -> Result<AvoidanceProblem> {
        AvoidanceProblem::checked(n, Mode::Rainbow { ps, qs })
    }

    fn checked(n: u32, mode: Mode) -> Result<AvoidanceProblem> {
        if n > MAX_SEARCH_GROUND {
            return domain(format!("search is capped at n = {MAX_SEARCH_GROUND}, got {n}"));
        }
        let patterns: Vec<&Poset> = match &mode {
            Mode::FixedPalette { patterns } => patterns.iter().collect(),
            Mode::Rainbow { ps, qs } => ps.iter().chain(qs).collect(),
        };
        if let Some(p) = patterns.iter().find(|p| p.size() == 0) {
            return domain(format!("empty pattern {p} is contained in every coloring"));
        }
        Ok(AvoidanceProblem { n, mode, budget: DEFAULT_BUDGET })
    }

    pub fn with_budget(mut self, budget: u64) -> AvoidanceProblem {
        self.budget = budget;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SearchOutcome {
    Avoidable { witness: Coloring, nodes: u64 },
    Unavoidable { nodes: u64, order: String },
    BudgetExceeded { nodes: u64, deepest: usize },
}

/// Name of the enumeration order recorded with exhaustion certificates.
pub const CANONICAL_ORDER: &str = "graded-colex/restricted-growth";

impl SearchOutcome {
    pub fn nodes(&self) -> u64 {
        match self {
            SearchOutcome::Avoidable { nodes, .. }
            | SearchOutcome::Unavoidable { nodes, .. }
            | SearchOutcome::BudgetExceeded { nodes, .. } => *nodes,
        }
    }

    pub fn is_avoidable(&self) -> bool {
        matches!(self, SearchOutcome::Avoidable { .. })
    }

    pub fn is_unavoidable(&self) -> bool {
        matches!(self, SearchOutcome::Unavoidable { .. })
    }

    /// Same kind and witness, ignoring node counts.
    pub fn same_verdict(&self, other: &SearchOutcome) -> bool {
        match (self, other) {
            (SearchOutcome::Avoidable { witness: a, .. }, SearchOutcome::Avoidable { witness: b, .. }) => a == b,
            (SearchOutcome::Unavoidable { .. }, SearchOutcome::Unavoidable { .. }) => true,
            (SearchOutcome::BudgetExceeded { .. }, SearchOutcome::BudgetExceeded { .. }) => true,
            _ => false,
        }
    }
}

#[derive(Clone, Debug)]
enum Shape {
    Chain(usize),
    Antichain(usize),
    General(Poset),
}

impl Shape {
    fn of(p: &Poset) -> Shape {
        if let Some(k) = p.as_chain() {
            Shape::Chain(k)
        } else if let Some(k) = p.as_antichain() {
            Shape::Antichain(k)
        } else {
            Shape::General(p.clone())
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Palette {
    /// Restricted growth strings, optionally capped.
    Growth(Option<u32>),
    /// All `k` colors at every set.
    Free(u32),
}

/// Read-only description shared by all workers.
struct Plan {
    n: u32,
    sets: Vec<Subset>,
    palette: Palette,
    /// Per color in fixed palette mode, or a single shared list.
    mono: Vec<Vec<Shape>>,
    mono_per_color: bool,
    rainbow: Vec<Shape>,
}

impl Plan {
    fn new(problem: &AvoidanceProblem) -> Result<Plan> {
        let lattice = Lattice::new(problem.n)?;
        let sets = lattice.subsets().to_vec();
        Ok(match &problem.mode {
            Mode::FixedPalette { patterns } => {
                let k = patterns.len() as u32;
                let identical = patterns.iter().all(|p| *p == patterns[0]);
                Plan {
                    n: problem.n,
                    sets,
                    palette: if identical { Palette::Growth(Some(k)) } else { Palette::Free(k) },
                    mono: patterns.iter().map(|p| vec![Shape::of(p)]).collect(),
                    mono_per_color: true,
                    rainbow: vec![],
                }
            }
            Mode::Rainbow { ps, qs } => Plan {
                n: problem.n,
                sets,
                palette: Palette::Growth(None),
                mono: vec![ps.iter().map(Shape::of).collect()],
                mono_per_color: false,
                rainbow: qs.iter().map(Shape::of).collect(),
            },
        })
    }

    fn candidates(&self, max_used: Option<u32>) -> std::ops::Range<u32> {
        match self.palette {
            Palette::Free(k) => 0..k,
            Palette::Growth(cap) => {
                let open = max_used.map_or(1, |m| m + 2);
                0..cap.map_or(open, |k| open.min(k))
            }
        }
    }
}

/// Mutable exploration state for one worker.
struct State<'a> {
    plan: &'a Plan,
    colors: Vec<u32>,
    by_mask: Vec<u32>,
    /// Longest monochromatic chain ending at each position.
    chain_len: Vec<u32>,
    max_used: Vec<Option<u32>>,
    nodes: u64,
    deepest: usize,
}

const UNSET: u32 = u32::MAX;

impl<'a> State<'a> {
    fn new(plan: &'a Plan) -> State<'a> {
        State {
            plan,
            colors: Vec::with_capacity(plan.sets.len()),
            by_mask: vec![UNSET; plan.sets.len()],
            chain_len: Vec::with_capacity(plan.sets.len()),
            max_used: vec![None],
            nodes: 0,
            deepest: 0,
        }
    }

    fn push(&mut self, color: u32) {
        let pos = self.colors.len();
        let s = self.plan.sets[pos];
        let below = (0..pos)
            .filter(|&q| self.colors[q] == color && self.plan.sets[q].is_proper_subset(s))
            .map(|q| self.chain_len[q])
            .max()
            .unwrap_or(0);
        self.colors.push(color);
        self.by_mask[s.0 as usize] = color;
        self.chain_len.push(below + 1);
        let m = *self.max_used.last().unwrap();
        self.max_used.push(Some(m.map_or(color, |m| m.max(color))));
        self.deepest = self.deepest.max(pos + 1);
    }

    fn pop(&mut self) {
        let pos = self.colors.len() - 1;
        self.colors.pop();
        self.by_mask[self.plan.sets[pos].0 as usize] = UNSET;
        self.chain_len.pop();
        self.max_used.pop();
    }

    /// Whether the newest assignment completes a forbidden copy.
    fn violated(&self) -> bool {
        let pos = self.colors.len() - 1;
        let color = self.colors[pos];
        let shapes = if self.plan.mono_per_color {
            &self.plan.mono[color as usize]
        } else {
            &self.plan.mono[0]
        };
        shapes.iter().any(|shape| self.mono_through(shape, pos, color))
            || self.plan.rainbow.iter().any(|shape| self.rainbow_through(shape, pos))
    }

    fn mono_through(&self, shape: &Shape, pos: usize, color: u32) -> bool {
        let s = self.plan.sets[pos];
        match shape {
            Shape::Chain(k) => self.chain_len[pos] as usize >= *k,
            Shape::Antichain(k) => {
                let others: Vec<Subset> = (0..pos)
                    .filter(|&q| self.colors[q] == color && !self.plan.sets[q].comparable(s))
                    .map(|q| self.plan.sets[q])
                    .collect();
                others.len() + 1 >= *k && antichain_at_least(&others, k - 1)
            }
            Shape::General(p) => {
                let class: Vec<Subset> =
                    (0..=pos).filter(|&q| self.colors[q] == color).map(|q| self.plan.sets[q]).collect();
                class.len() >= p.size()
                    && embedding::find_through(p, &class, None, false, (class.len() - 1) as u32).is_some()
            }
        }
    }

    fn rainbow_through(&self, shape: &Shape, pos: usize) -> bool {
        let s = self.plan.sets[pos];
        match shape {
            Shape::Chain(k) => {
                let used = 1u128 << self.by_mask[s.0 as usize];
                rainbow_chain_below(&self.by_mask, s, k - 1, used)
            }
            Shape::Antichain(k) => {
                let color = self.colors[pos];
                let (family, colors): (Vec<Subset>, Vec<u32>) = (0..pos)
                    .filter(|&q| self.colors[q] != color && !self.plan.sets[q].comparable(s))
                    .map(|q| (self.plan.sets[q], self.colors[q]))
                    .unzip();
                embedding::rainbow_antichain(&family, &colors, k - 1).is_some()
            }
            Shape::General(q) => {
                let family = &self.plan.sets[..=pos];
                embedding::find_through(q, family, Some(&self.colors), true, pos as u32).is_some()
            }
        }
    }
}

/// Some `need` proper subsets of `top`, strictly nested, with colors outside
/// `used` and pairwise distinct.
fn rainbow_chain_below(by_mask: &[u32], top: Subset, need: usize, used: u128) -> bool {
    if need == 0 {
        return true;
    }
    if (top.len() as usize) < need {
        return false;
    }
    let t = top.0;
    let mut sub = t.wrapping_sub(1) & t;
    loop {
        let z = Subset(sub);
        if z.len() as usize >= need - 1 {
            let bit = 1u128 << by_mask[sub as usize];
            if used & bit == 0 && rainbow_chain_below(by_mask, z, need - 1, used | bit) {
                return true;
            }
        }
        if sub == 0 {
            return false;
        }
        sub = sub.wrapping_sub(1) & t;
    }
}

fn antichain_at_least(family: &[Subset], k: usize) -> bool {
    if k == 0 {
        return true;
    }
    if family.len() < k {
        return false;
    }
    let succ: Vec<Vec<u32>> = family
        .iter()
        .map(|&x| {
            (0..family.len() as u32)
                .filter(|&j| x.is_proper_subset(family[j as usize]))
                .collect()
        })
        .collect();
    family.len() - matching::matching_size(family.len(), &succ) >= k
}

/// Shared counters for budget enforcement and early stopping.
struct Shared {
    nodes: AtomicU64,
    budget: u64,
    exhausted: AtomicBool,
    /// Smallest prefix index known to contain an avoiding coloring.
    best: AtomicUsize,
}

const FLUSH: u64 = 1024;

enum Walk {
    Found,
    Exhausted,
    OutOfBudget,
    Cancelled,
}

/// A finished prefix: how it ended, the colors it stopped at and its deepest level.
type Slot = (Walk, Vec<u32>, usize);

impl<'a> State<'a> {
    fn walk(&mut self, shared: &Shared, index: usize, pending: &mut u64) -> Walk {
        if self.colors.len() == self.plan.sets.len() {
            return Walk::Found;
        }
        let range = self.plan.candidates(*self.max_used.last().unwrap());
        for color in range {
            self.nodes += 1;
            *pending += 1;
            if *pending >= FLUSH {
                let total = shared.nodes.fetch_add(*pending, Ordering::Relaxed) + *pending;
                *pending = 0;
                if total > shared.budget {
                    shared.exhausted.store(true, Ordering::Relaxed);
                }
                if shared.best.load(Ordering::Relaxed) < index {
                    return Walk::Cancelled;
                }
            }
            if shared.exhausted.load(Ordering::Relaxed) {
                return Walk::OutOfBudget;
            }
            self.push(color);
            if !self.violated() {
                match self.walk(shared, index, pending) {
                    Walk::Exhausted => {}
                    other => return other,
                }
            }
            self.pop();
        }
        Walk::Exhausted
    }
}

/// Decides avoidability single-threaded.
pub fn decide(problem: &AvoidanceProblem) -> Result<SearchOutcome> {
    decide_with_jobs(problem, 1)
}

/// Decides avoidability, splitting the tree at a fixed depth across `jobs`
/// threads. The witness is the first avoiding coloring in enumeration
/// order regardless of `jobs`.
pub fn decide_with_jobs(problem: &AvoidanceProblem, jobs: usize) -> Result<SearchOutcome> {
    let plan = Plan::new(problem)?;
    let shared = Shared {
        nodes: AtomicU64::new(0),
        budget: problem.budget,
        exhausted: AtomicBool::new(false),
        best: AtomicUsize::new(usize::MAX),
    };
    let jobs = jobs.max(1);
    let depth = if jobs == 1 { 0 } else { split_depth(&plan, jobs) };
    let (prefixes, prefix_nodes) = prefixes(&plan, depth);
    shared.nodes.fetch_add(prefix_nodes, Ordering::Relaxed);
    let results: Mutex<Vec<Option<Slot>>> =
        Mutex::new((0..prefixes.len()).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    let run = || {
        let mut pending = 0u64;
        loop {
            let i = next.fetch_add(1, Ordering::Relaxed);
            if i >= prefixes.len() || shared.best.load(Ordering::Relaxed) < i {
                break;
            }
            let mut state = State::new(&plan);
            for &c in &prefixes[i] {
                state.push(c);
            }
            let walk = state.walk(&shared, i, &mut pending);
            if matches!(walk, Walk::Found) {
                shared.best.fetch_min(i, Ordering::Relaxed);
            }
            results.lock().unwrap()[i] = Some((walk, state.colors.clone(), state.deepest));
        }
        shared.nodes.fetch_add(pending, Ordering::Relaxed);
    };
    if jobs == 1 {
        run();
    } else {
        std::thread::scope(|scope| {
            for _ in 0..jobs {
                scope.spawn(run);
            }
        });
    }
    let nodes = shared.nodes.load(Ordering::Relaxed);
    let mut deepest = depth;
    for slot in results.into_inner().unwrap() {
        match slot {
            Some((Walk::Found, colors, _)) => {
                let witness = Coloring::new(plan.n, colors)?;
                return Ok(SearchOutcome::Avoidable { witness, nodes });
            }
            Some((Walk::Exhausted, _, d)) => deepest = deepest.max(d),
            Some((_, _, d)) => {
                return Ok(SearchOutcome::BudgetExceeded { nodes, deepest: deepest.max(d) });
            }
            None => return Ok(SearchOutcome::BudgetExceeded { nodes, deepest }),
        }
    }
    Ok(SearchOutcome::Unavoidable { nodes, order: CANONICAL_ORDER.into() })
}

/// Prefixes of the given depth that pass the checks, in enumeration order.
fn prefixes(plan: &Plan, depth: usize) -> (Vec<Vec<u32>>, u64) {
    let depth = depth.min(plan.sets.len());
    let mut out = Vec::new();
    let mut state = State::new(plan);
    fn go(state: &mut State, depth: usize, out: &mut Vec<Vec<u32>>) {
        if state.colors.len() == depth {
            out.push(state.colors.clone());
            return;
        }
        for color in state.plan.candidates(*state.max_used.last().unwrap()) {
            state.nodes += 1;
            state.push(color);
            if !state.violated() {
                go(state, depth, out);
            }
            state.pop();
        }
    }
    go(&mut state, depth, &mut out);
    (out, state.nodes)
}

fn split_depth(plan: &Plan, jobs: usize) -> usize {
    let target = jobs * 8;
    (1..=plan.sets.len())
        .find(|&d| prefixes(plan, d).0.len() >= target)
        .unwrap_or(plan.sets.len())
        .min(plan.sets.len().saturating_sub(1))
}

/// One decision in a scan over `n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanStep {
    pub n: u32,
    pub outcome: SearchOutcome,
}

/// Result of scanning `n` upward: the value lies in `[lower, upper]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RamseyScan {
    /// One more than the largest `n` shown avoidable (0 if none).
    pub lower: u32,
    /// Smallest `n` shown unavoidable.
    pub upper: Option<u32>,
    /// Avoiding coloring at `lower - 1`.
    pub witness: Option<Coloring>,
    pub steps: Vec<ScanStep>,
}

impl RamseyScan {
    pub fn value(&self) -> Option<u32> {
        (self.upper == Some(self.lower)).then_some(self.lower)
    }
}

fn scan(
    n_lo: u32,
    n_hi: u32,
    jobs: usize,
    make: impl Fn(u32) -> Result<AvoidanceProblem>,
) -> Result<RamseyScan> {
    if n_lo > n_hi {
        return domain(format!("empty range {n_lo}..={n_hi}"));
    }
    let mut result = RamseyScan { lower: 0, upper: None, witness: None, steps: vec![] };
    for n in n_lo..=n_hi {
        let outcome = decide_with_jobs(&make(n)?, jobs)?;
        match &outcome {
            SearchOutcome::Avoidable { witness, .. } => {
                result.lower = n + 1;
                result.witness = Some(witness.clone());
            }
            SearchOutcome::Unavoidable { .. } => result.upper = Some(n),
            SearchOutcome::BudgetExceeded { .. } => {}
        }
        result.steps.push(ScanStep { n, outcome });
        if result.upper.is_some() {
            break;
        }
    }
    Ok(result)
}

/// `R(P_1, …, P_k)` scanned over `n_lo..=n_hi`.
pub fn ramsey(patterns: &[Poset], n_lo: u32, n_hi: u32, budget: u64, jobs: usize) -> Result<RamseyScan> {
    scan(n_lo, n_hi, jobs, |n| {
        Ok(AvoidanceProblem::fixed_palette(n, patterns.to_vec())?.with_budget(budget))
    })
}

/// `RR(𝒫, 𝒬)` scanned over `n_lo..=n_hi`.
pub fn rainbow_ramsey(
    ps: &[Poset],
    qs: &[Poset],
    n_lo: u32,
    n_hi: u32,
    budget: u64,
    jobs: usize,
) -> Result<RamseyScan> {
    scan(n_lo, n_hi, jobs, |n| {
        Ok(AvoidanceProblem::rainbow(n, ps.to_vec(), qs.to_vec())?.with_budget(budget))
    })
}
