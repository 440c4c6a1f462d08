//! Closed-form lower and upper bounds on rainbow Ramsey numbers.
//!
//! Exact values for the shapes in the known-values table (chains,
//! antichains, Boolean posets) are reported next to the general formulas;
//! they never replace them silently.

use std::sync::OnceLock;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize, Serializer};

use crate::lattice::{binomial, Subset};
use crate::posets::Poset;
use crate::{domain, Result};

/// A nonnegative integer bound; serialized as a JSON number when it fits in
/// 64 bits and as a decimal string otherwise.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct BoundValue(pub BigUint);

impl BoundValue {
    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }
}

impl From<u64> for BoundValue {
    fn from(v: u64) -> Self {
        BoundValue(BigUint::from(v))
    }
}

impl Serialize for BoundValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0.to_u64() {
            Some(v) => s.serialize_u64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl std::fmt::Display for BoundValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Bound {
    pub value: BoundValue,
    pub source: String,
}

impl Bound {
    fn new(value: impl Into<BoundValue>, source: impl Into<String>) -> Bound {
        Bound { value: value.into(), source: source.into() }
    }
}

impl From<BigUint> for BoundValue {
    fn from(v: BigUint) -> Self {
        BoundValue(v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundsReport {
    pub p: String,
    pub q: String,
    pub lower: Vec<Bound>,
    pub upper: Vec<Bound>,
    pub best_lower: BoundValue,
    pub best_upper: Option<BoundValue>,
    /// Exact value from the known-values table, when a row applies.
    pub exact: Option<u64>,
}

#[derive(Debug, Deserialize)]
struct KnownValues {
    #[allow(dead_code)]
    version: u32,
    rainbow_rows: Vec<Row>,
    boolean_ramsey_exact: Vec<ExactR>,
    boolean_ramsey_ranges: Vec<RangeR>,
    lubell_limits: Vec<LubellLimit>,
}

/// A row of the exact-value table.
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct Row {
    pub id: String,
    pub p: String,
    pub q: String,
    pub value: String,
    pub when: String,
}

#[derive(Debug, Deserialize)]
struct ExactR {
    pattern: String,
    k: u64,
    value: u64,
}

#[derive(Debug, Deserialize)]
struct RangeR {
    pattern: String,
    k: u64,
    lower: u64,
    upper: u64,
}

#[derive(Debug, Deserialize)]
struct LubellLimit {
    pattern: String,
    numerator: u64,
    denominator: u64,
}

fn known() -> &'static KnownValues {
    static KNOWN: OnceLock<KnownValues> = OnceLock::new();
    KNOWN.get_or_init(|| {
        serde_json::from_str(include_str!("../data/known_values.json")).expect("bundled table parses")
    })
}

/// The rows of the exact-value table.
pub fn table_rows() -> &'static [Row] {
    &known().rainbow_rows
}

/// Least `N` with `C(N, ⌊N/2⌋) ≥ (m - 1)(n - 1) + 1`.
pub fn n_threshold(m: u64, n: u64) -> u64 {
    let target = (m.saturating_sub(1)).saturating_mul(n.saturating_sub(1)).saturating_add(1);
    (0u32..)
        .find(|&big_n| binomial(big_n, big_n / 2) >= target)
        .expect("central binomials grow without bound") as u64
}

/// Méroueh's bound `R_k(B_m) ≤ 1000 m^7 16^m k`.
pub fn meroueh(m: u32, k: u64) -> BigUint {
    BigUint::from(1000u32) * BigUint::from(m).pow(7) * BigUint::from(16u32).pow(m) * BigUint::from(k)
}

/// `m^7 2^(2n + 4m + 9)`.
pub fn closed_form(m: u32, n: u32) -> BigUint {
    BigUint::from(m).pow(7) * (BigUint::one() << (2 * n + 4 * m + 9))
}

/// `R_k(P)` exactly, when known: chains, `B_1`, and tabulated `B_m` values.
pub fn rk_exact(p: &Poset, k: u64) -> Option<u64> {
    if let Some(m) = p.as_chain() {
        return Some(k * (m as u64).saturating_sub(1));
    }
    let m = p.as_boolean()?;
    let name = format!("B{m}");
    known()
        .boolean_ramsey_exact
        .iter()
        .find(|r| r.pattern == name && r.k == k)
        .map(|r| r.value)
        .or((m == 1).then_some(k))
        .or((k == 1).then_some(m as u64))
}

/// Lower bound on `R_k(P)`: `mk` for `B_m`, `k(m - 1)` for `C_m`.
pub fn rk_lower(p: &Poset, k: u64) -> Result<u64> {
    if let Some(m) = p.as_chain() {
        return Ok(k * (m as u64).saturating_sub(1));
    }
    if let Some(m) = p.as_boolean() {
        let name = format!("B{m}");
        let ranged = known().boolean_ramsey_ranges.iter().find(|r| r.pattern == name && r.k == k);
        return Ok(ranged.map_or(0, |r| r.lower).max(m as u64 * k));
    }
    domain(format!("no R_k lower bound is tabulated for {p}"))
}

/// Best known upper bound on `R_k(B_m)` with its source.
pub fn rk_upper_boolean(m: u32, k: u64) -> (BigUint, &'static str) {
    if m == 0 {
        return (BigUint::zero(), "trivial");
    }
    if m == 1 {
        return (BigUint::from(k), "chain");
    }
    let name = format!("B{m}");
    if k == 1 {
        return (BigUint::from(m), "one-color");
    }
    if let Some(r) = known().boolean_ramsey_exact.iter().find(|r| r.pattern == name && r.k == k) {
        return (BigUint::from(r.value), "known-exact");
    }
    let mut best = (meroueh(m, k), "meroueh");
    if let Some(r) = known().boolean_ramsey_ranges.iter().find(|r| r.pattern == name && r.k == k) {
        best = best.min((BigUint::from(r.upper), "known-range"));
    }
    if let Some(l) = known().lubell_limits.iter().find(|l| l.pattern == name) {
        // A class with Lubell mass above the limit contains the pattern, and
        // the k classes of B_N share a total mass of N + 1.
        let v = BigUint::from(l.numerator * k / l.denominator);
        best = best.min((v, "lubell-limit"));
    }
    best
}

/// `Σ_{i=1}^{2^n - 1} R_i(B_m)` with the best known upper bound per term.
pub fn sum_bound(m: u32, n: u32) -> BigUint {
    (1..(1u64 << n)).map(|i| rk_upper_boolean(m, i).0).sum()
}

/// Exact value from the table when `(P, Q)` matches one of its rows.
pub fn table_value(p: &Poset, q: &Poset) -> Option<(u64, &'static str)> {
    let (pc, pa, pb) = (p.as_chain(), p.as_antichain(), p.as_boolean());
    let (qc, qa, qb) = (q.as_chain(), q.as_antichain(), q.as_boolean());
    let rows: [Option<(u64, &'static str)>; 8] = [
        match (pa, qa) {
            (Some(m), Some(n)) if m >= 2 && n >= 2 => Some((n_threshold(m as u64, n as u64), "antichain-antichain")),
            _ => None,
        },
        match (pa, qc) {
            (Some(2), Some(n)) if n >= 2 => Some((n as u64, "antichain2-chain")),
            _ => None,
        },
        match (pb, qb) {
            (Some(m), Some(1)) if m >= 1 => Some((m as u64, "boolean-b1")),
            _ => None,
        },
        match (pb, qb) {
            (Some(1), Some(n)) if n >= 1 => Some(((1u64 << n) - 1, "b1-boolean")),
            _ => None,
        },
        match (pb, qb) {
            (Some(2), Some(2)) => Some((6, "b2-b2")),
            _ => None,
        },
        match (pc, qa) {
            (Some(2), Some(n)) if n >= 3 => Some((n as u64 + 2, "chain-antichain")),
            (Some(m), Some(n)) if m >= 2 && n >= 2 && (m >= 3 || n == 2) => {
                Some(((m as u64 - 1) * (n as u64 - 1) + 2, "chain-antichain"))
            }
            _ => None,
        },
        match (pc, qb) {
            (Some(m), Some(n)) if m >= 2 && n >= 1 => Some(((m as u64 - 1) * ((1u64 << n) - 1), "chain-boolean")),
            _ => None,
        },
        match (pc, qc) {
            (Some(m), Some(n)) if m >= 2 && n >= 2 => Some(((m as u64 - 1) * (n as u64 - 1), "chain-chain")),
            _ => None,
        },
    ];
    let hits: Vec<(u64, &'static str)> = rows.into_iter().flatten().collect();
    debug_assert!(hits.windows(2).all(|w| w[0].0 == w[1].0), "table rows disagree: {hits:?}");
    hits.into_iter().next()
}

/// Lower bounds from heights and widths, the antichain-versus-chain trace
/// construction, and `R_{|Q|-1}(P)`.
pub fn lower_bounds(p: &Poset, q: &Poset) -> Vec<Bound> {
    let (hp, wp) = (p.height() as u64, p.width() as u64);
    let (hq, wq) = (q.height() as u64, q.width() as u64);
    let mut out = vec![
        Bound::new(hp.saturating_sub(1) * hq.saturating_sub(1), "height-height"),
        Bound::new(n_threshold(wp, wq), "width-width"),
    ];
    if hp == 2 && wq >= 3 {
        out.push(Bound::new(wq + 2, "height-width"));
    } else if (hp == 2 && wq == 2) || (hp >= 3 && wq >= 2) {
        out.push(Bound::new((hp - 1) * (wq - 1) + 2, "height-width"));
    }
    if let (Some(m), Some(n)) = (p.as_antichain(), q.as_chain()) {
        if m >= 2 && n >= 2 {
            let v = n_threshold(m as u64, 2) + n as u64;
            out.push(Bound::new(v.saturating_sub(3), "antichain-chain-trace"));
        }
    }
    if q.size() >= 2 {
        let k = q.size() as u64 - 1;
        if let Some(v) = rk_exact(p, k) {
            out.push(Bound::new(v, "ramsey-palette-exact"));
        } else if let Ok(v) = rk_lower(p, k) {
            out.push(Bound::new(v, "ramsey-palette-lower"));
        }
    }
    if let Some((v, row)) = table_value(p, q) {
        out.push(Bound::new(v, format!("table:{row}")));
    }
    out
}

fn boolean_upper(m: u32, n: u32, tag: &str, out: &mut Vec<Bound>) {
    let bm = Poset::boolean(m).ok();
    let bn = Poset::boolean(n).ok();
    if let (Some(bm), Some(bn)) = (bm, bn) {
        if let Some((v, row)) = table_value(&bm, &bn) {
            out.push(Bound::new(v, format!("{tag}table:{row}")));
        }
    }
    if m >= 1 && n <= 16 {
        out.push(Bound::new(sum_bound(m, n), format!("{tag}sum")));
    }
    if m >= 1 {
        out.push(Bound::new(closed_form(m, n), format!("{tag}closed-form")));
    }
}

/// Upper bounds: the table, the sum bound and closed form for Boolean
/// shapes, and the route through `B_{dim₂ P}` and `B_{dim₂ Q}`.
pub fn upper_bounds(p: &Poset, q: &Poset) -> Vec<Bound> {
    let mut out = Vec::new();
    if let Some((v, row)) = table_value(p, q) {
        out.push(Bound::new(v, format!("table:{row}")));
    }
    match (p.as_boolean(), q.as_boolean()) {
        (Some(m), Some(n)) => boolean_upper(m, n, "", &mut out),
        _ => {
            if let (Some(dp), Some(dq)) = (p.dim2(), q.dim2()) {
                boolean_upper(dp, dq, "dim2:", &mut out);
            }
        }
    }
    out
}

pub fn report(p: &Poset, q: &Poset) -> BoundsReport {
    let lower = lower_bounds(p, q);
    let upper = upper_bounds(p, q);
    let best_lower = lower.iter().map(|b| b.value.clone()).max().unwrap_or(BoundValue::from(0));
    let best_upper = upper.iter().map(|b| b.value.clone()).min();
    BoundsReport {
        p: p.label().to_string(),
        q: q.label().to_string(),
        lower,
        upper,
        best_lower,
        best_upper,
        exact: table_value(p, q).map(|(v, _)| v),
    }
}

/// `Σ_{F ∈ family} 1 / C(n, |F|)` as an exact fraction.
pub fn lubell(n: u32, family: &[Subset]) -> Result<BigRational> {
    crate::lattice::check_ground(n)?;
    if let Some(s) = family.iter().find(|s| !s.fits(n)) {
        return domain(format!("{s} does not fit in [{n}]"));
    }
    Ok(family.iter().fold(BigRational::zero(), |acc, s| {
        acc + BigRational::new(1.into(), binomial(n, s.len()).into())
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{level, Lattice};
    use crate::posets::parse_spec;

    fn p(s: &str) -> Poset {
        parse_spec(s).unwrap()
    }

    fn u(v: &BoundValue) -> u64 {
        v.to_u64().unwrap()
    }

    #[test]
    fn thresholds() {
        assert_eq!(n_threshold(2, 2), 2);
        assert_eq!(n_threshold(2, 3), 3);
        assert_eq!(n_threshold(3, 3), 4);
        assert_eq!(n_threshold(1, 5), 0);
    }

    #[test]
    fn lower_examples() {
        let r = report(&p("B2"), &p("B2"));
        let has = |src: &str, v: u64| r.lower.iter().any(|b| b.source == src && u(&b.value) == v);
        assert!(has("height-height", 4));
        assert!(has("width-width", 2));
        assert!(has("ramsey-palette-exact", 6));
        assert_eq!(u(&r.best_lower), 6);
        let r = report(&p("C3"), &p("A2"));
        assert!(r.lower.iter().any(|b| b.source == "height-width" && u(&b.value) == 4));
        let r = report(&p("A2"), &p("C4"));
        assert!(r.lower.iter().any(|b| b.source == "antichain-chain-trace" && u(&b.value) == 3));
        assert_eq!(r.exact, Some(4));
    }

    #[test]
    fn upper_examples() {
        let r = report(&p("B2"), &p("B2"));
        assert!(r.upper.iter().any(|b| b.source == "sum" && u(&b.value) == 12));
        let closed = r.upper.iter().find(|b| b.source == "closed-form").unwrap();
        assert_eq!(closed.value.0, BigUint::from(128u32) * (BigUint::one() << 21));
        assert_eq!(u(r.best_upper.as_ref().unwrap()), 6);
        let r = report(&p("C3"), &p("C4"));
        assert_eq!(u(r.best_upper.as_ref().unwrap()), 6);
        let big = serde_json::to_value(BoundValue(BigUint::one() << 70)).unwrap();
        assert_eq!(big, serde_json::json!("1180591620717411303424"));
        assert_eq!(serde_json::to_value(BoundValue::from(7)).unwrap(), serde_json::json!(7));
    }

    #[test]
    fn rk_values() {
        assert_eq!(rk_lower(&p("B2"), 4).unwrap(), 8);
        assert_eq!(rk_lower(&p("B3"), 2).unwrap(), 6);
        assert_eq!(rk_lower(&p("C3"), 2).unwrap(), 4);
        assert!(rk_lower(&p("A3"), 2).is_err());
        assert_eq!(rk_upper_boolean(2, 4).0, BigUint::from(10u32));
        assert_eq!(rk_exact(&p("C2"), 2), Some(2));
    }

    #[test]
    fn lubell_values() {
        let l = Lattice::new(4).unwrap();
        assert_eq!(lubell(4, l.subsets()).unwrap(), BigRational::from_integer(5.into()));
        assert_eq!(lubell(4, &level(4, 2).unwrap()).unwrap(), BigRational::one());
        let chain = [Subset(0), Subset(1), Subset(3), Subset(7)];
        assert_eq!(lubell(3, &chain).unwrap(), BigRational::new(8.into(), 3.into()));
        assert!(lubell(2, &[Subset(4)]).is_err());
    }
}
