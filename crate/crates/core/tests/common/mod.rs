#![allow(dead_code)]

use rainbow_ramsey::lattice::Subset;
use rainbow_ramsey::posets::{parse_spec, Poset};

pub fn p(s: &str) -> Poset {
    parse_spec(s).unwrap()
}

/// Every strong copy of `pat` in `family`, by trying all injections.
pub fn naive_copies(family: &[Subset], pat: &Poset) -> Vec<Vec<Subset>> {
    fn go(family: &[Subset], pat: &Poset, chosen: &mut Vec<Subset>, out: &mut Vec<Vec<Subset>>) {
        let x = chosen.len();
        if x == pat.size() {
            out.push(chosen.clone());
            return;
        }
        for &s in family {
            if chosen.contains(&s) {
                continue;
            }
            let fits = chosen.iter().enumerate().all(|(y, &t)| {
                let t_in_s = t.0 & s.0 == t.0 && t != s;
                let s_in_t = t.0 & s.0 == s.0 && t != s;
                pat.less(y, x) == t_in_s && pat.less(x, y) == s_in_t
            });
            if fits {
                chosen.push(s);
                go(family, pat, chosen, out);
                chosen.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(family, pat, &mut Vec::new(), &mut out);
    out
}

pub fn naive_has(family: &[Subset], pat: &Poset) -> bool {
    !naive_copies(family, pat).is_empty()
}

/// Copies of `pat` in `family` whose colors satisfy `ok`.
pub fn naive_colored(family: &[Subset], pat: &Poset, color: impl Fn(Subset) -> u32, rainbow: bool) -> Vec<Vec<Subset>> {
    naive_copies(family, pat)
        .into_iter()
        .filter(|c| {
            let mut cs: Vec<u32> = c.iter().map(|&s| color(s)).collect();
            cs.sort();
            cs.dedup();
            if rainbow {
                cs.len() == c.len()
            } else {
                cs.len() == 1
            }
        })
        .collect()
}
