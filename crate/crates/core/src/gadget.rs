//! Gadget tournaments: small tournaments in which every vertex subset of size
//! at least `h / k_u` induces a non-transitive subtournament.

use rand::seq::index;
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::graph::Tournament;
use crate::seed;

/// State of the gadget property check for a given `k_u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verification {
    Exhaustive,
    Sampled { trials: usize },
    Unverified,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gadget {
    pub tournament: Tournament,
    pub k_u: usize,
    pub verified: Verification,
}

impl Gadget {
    pub fn unverified(tournament: Tournament) -> Self {
        Self {
            tournament,
            k_u: 0,
            verified: Verification::Unverified,
        }
    }

    pub fn h(&self) -> usize {
        self.tournament.n()
    }
}

/// Smallest `h` with `h / (4 ln h + 1) >= k_u (1 - ln(1 - p))`.
pub fn min_gadget_size(k_u: usize, p: f64) -> Result<usize> {
    if k_u < 2 || !(p > 0.0 && p < 1.0) {
        return Err(Error::Config(format!(
            "min_gadget_size needs k_u >= 2 and 0 < p < 1 (got k_u = {k_u}, p = {p})"
        )));
    }
    let rhs = k_u as f64 * (1.0 - (1.0 - p).ln());
    Ok((1..)
        .find(|&h| {
            let h = h as f64;
            h / (4.0 * h.ln() + 1.0) >= rhs
        })
        .expect("lhs grows without bound"))
}

/// Success probability guaranteed for a random `h`-vertex tournament, obtained
/// by solving the size inequality for `p`; clamped at zero.
pub fn gadget_success_bound(h: usize, k_u: usize) -> f64 {
    let h = h as f64;
    let a = h / (k_u as f64 * (4.0 * h.ln() + 1.0));
    (1.0 - (1.0 - a).exp()).max(0.0)
}

/// Uniform random tournament on `h` vertices.
pub fn random_gadget(h: usize, seed: u64) -> Result<Gadget> {
    if h < 3 {
        return Err(Error::Gadget(format!("gadget order must be at least 3, got {h}")));
    }
    let mut rng = seed::rng(seed);
    Ok(Gadget::unverified(Tournament::from_fn(h, |_, _| rng.random_bool(0.5))))
}

pub fn is_prime(p: usize) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Paley tournament on `Z_p`: `i -> j` iff `j - i` is a nonzero square mod `p`.
/// Requires `p` prime with `p = 3 (mod 4)`, so that `-1` is a non-residue and
/// exactly one of `j - i`, `i - j` is a residue.
pub fn quadratic_residue_gadget(p: usize) -> Result<Gadget> {
    if !is_prime(p) {
        return Err(Error::Gadget(format!("{p} is not prime")));
    }
    if p % 4 != 3 {
        return Err(Error::Gadget(format!(
            "{p} is not 3 mod 4; the residue orientation would not be a tournament"
        )));
    }
    let mut residue = vec![false; p];
    for x in 1..p {
        residue[x * x % p] = true;
    }
    let t = Tournament::from_fn(p, |i, j| residue[(j + p - i) % p]);
    Ok(Gadget::unverified(t))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    Exhaustive,
    Sampled { trials: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Verified(Gadget),
    /// Vertices of `H` inducing a transitive subtournament.
    Counterexample(Vec<usize>),
}

impl Verdict {
    pub fn is_verified(&self) -> bool {
        matches!(self, Verdict::Verified(_))
    }
}

/// Upper limit on subsets enumerated by exhaustive verification.
pub const EXHAUSTIVE_LIMIT: u64 = 10_000_000;

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Checks that no subset of size `ceil(h / k_u)` is transitive. Larger
/// transitive subsets contain transitive subsets of that size, so this is
/// the whole gadget property.
pub fn verify_gadget(gadget: &Gadget, k_u: usize, mode: VerifyMode) -> Result<Verdict> {
    let h = gadget.h();
    if k_u == 0 {
        return Err(Error::Config("k_u must be positive".into()));
    }
    if h > 64 {
        return Err(Error::SizeLimit {
            what: "gadget order",
            size: h as u64,
            limit: 64,
        });
    }
    let size = h.div_ceil(k_u);
    let rows: Vec<u64> = (0..h)
        .map(|v| {
            (0..h)
                .filter(|&u| gadget.tournament.beats(v, u))
                .fold(0u64, |acc, u| acc | 1 << u)
        })
        .collect();
    let verified = match mode {
        VerifyMode::Exhaustive => {
            let count = binomial(h as u64, size as u64);
            if count > EXHAUSTIVE_LIMIT {
                return Err(Error::SizeLimit {
                    what: "exhaustive gadget verification subsets (use sampled mode)",
                    size: count,
                    limit: EXHAUSTIVE_LIMIT,
                });
            }
            if let Some(witness) = find_transitive_subset(&rows, size) {
                return Ok(Verdict::Counterexample(witness));
            }
            Verification::Exhaustive
        }
        VerifyMode::Sampled { trials, seed } => {
            let mut rng = seed::rng(seed);
            for _ in 0..trials {
                let picked = index::sample(&mut rng, h, size).into_vec();
                let mask = picked.iter().fold(0u64, |m, &v| m | 1 << v);
                if is_transitive_mask(&rows, mask) {
                    let mut picked = picked;
                    picked.sort_unstable();
                    return Ok(Verdict::Counterexample(picked));
                }
            }
            Verification::Sampled { trials }
        }
    };
    Ok(Verdict::Verified(Gadget {
        tournament: gadget.tournament.clone(),
        k_u,
        verified,
    }))
}

/// A tournament on `m` vertices is transitive iff its in-subset out-degrees
/// are exactly `0, 1, ..., m - 1`.
fn is_transitive_mask(rows: &[u64], mask: u64) -> bool {
    let mut seen = 0u64;
    let mut rest = mask;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        let score = (rows[v] & mask).count_ones();
        let bit = 1u64 << score;
        if seen & bit != 0 {
            return false;
        }
        seen |= bit;
    }
    true
}

fn find_transitive_subset(rows: &[u64], size: usize) -> Option<Vec<usize>> {
    let h = rows.len();
    if size == 0 || size > h {
        return None;
    }
    let mut idx: Vec<usize> = (0..size).collect();
    loop {
        let mask = idx.iter().fold(0u64, |m, &v| m | 1 << v);
        if is_transitive_mask(rows, mask) {
            return Some(idx);
        }
        // next combination in lexicographic order
        let i = (0..size).rev().find(|&i| idx[i] < h - size + i)?;
        idx[i] += 1;
        for j in (i + 1)..size {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
