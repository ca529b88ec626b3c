//! Wedge combs over ℤ and ℤ² with deterministic, tabulated or i.i.d. tooth
//! profiles, plus the full comb over ℤ.

use crate::graph::{FamilyTag, NeighborOracle, Vertex};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Law of the i.i.d. tooth heights (support in the positive integers).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HeightLaw {
    /// `P(f = support[i]) ∝ weights[i]`.
    Table {
        support: Vec<u64>,
        weights: Vec<f64>,
    },
    /// `P(f = k) = p (1 - p)^(k-1)`, `k >= 1`.
    Geometric { p: f64 },
    /// `f = floor(U^(-1/exponent))`, so `P(f >= k) = k^-exponent`.
    Pareto { exponent: f64 },
}

impl HeightLaw {
    fn validate(&self) -> Result<()> {
        let ok = match self {
            HeightLaw::Table { support, weights } => {
                !support.is_empty()
                    && support.len() == weights.len()
                    && support.iter().all(|&k| k >= 1)
                    && weights.iter().all(|&w| w >= 0.0 && w.is_finite())
                    && weights.iter().sum::<f64>() > 0.0
            }
            HeightLaw::Geometric { p } => *p > 0.0 && *p <= 1.0,
            HeightLaw::Pareto { exponent } => *exponent > 0.0 && exponent.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSpec(format!("invalid height law {self:?}")))
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match self {
            HeightLaw::Table { support, weights } => {
                let total: f64 = weights.iter().sum();
                let mut u = rng.random::<f64>() * total;
                for (k, w) in support.iter().zip(weights) {
                    if u < *w {
                        return *k;
                    }
                    u -= w;
                }
                *support.last().expect("validated nonempty")
            }
            HeightLaw::Geometric { p } => {
                if *p >= 1.0 {
                    return 1;
                }
                let u: f64 = 1.0 - rng.random::<f64>();
                1 + (u.ln() / (1.0 - p).ln()).floor().min(1e15) as u64
            }
            HeightLaw::Pareto { exponent } => {
                let u: f64 = 1.0 - rng.random::<f64>();
                u.powf(-1.0 / exponent).floor().min(1e15) as u64
            }
        }
    }
}

/// Tooth profile `f`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    /// `f(x) = floor(C |x|^alpha)`.
    Power {
        #[serde(rename = "C", alias = "c")]
        c: f64,
        alpha: f64,
    },
    /// `f(x) = floor(c ln(1 + |x|))`.
    Log { c: f64 },
    /// Explicit heights; spine points missing from the table get `default`.
    Table {
        heights: BTreeMap<i64, u64>,
        #[serde(default)]
        default: u64,
    },
    /// Independent heights drawn from `law`, a pure function of `(seed, x)`.
    Iid { law: HeightLaw, seed: u64 },
    /// Comb(ℤ): teeth are full copies of ℤ through every spine point.
    Full,
}

fn one() -> u8 {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CombSpec {
    pub profile: Profile,
    #[serde(default = "one")]
    pub base_dimension: u8,
}

impl CombSpec {
    pub fn power(c: f64, alpha: f64) -> Self {
        CombSpec {
            profile: Profile::Power { c, alpha },
            base_dimension: 1,
        }
    }

    /// Comb(ℤ, α): `f(x) = |x|^α`.
    pub fn wedge(alpha: f64) -> Self {
        Self::power(1.0, alpha)
    }

    pub fn full() -> Self {
        CombSpec {
            profile: Profile::Full,
            base_dimension: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.base_dimension == 1 || self.base_dimension == 2) {
            return Err(Error::InvalidSpec("base_dimension must be 1 or 2".into()));
        }
        match &self.profile {
            Profile::Power { c, alpha } => {
                if !(c.is_finite() && *c >= 0.0 && alpha.is_finite() && *alpha >= 0.0) {
                    return Err(Error::InvalidSpec(format!(
                        "power profile needs C >= 0 and alpha >= 0 (got C={c}, alpha={alpha})"
                    )));
                }
            }
            Profile::Log { c } => {
                if !(c.is_finite() && *c >= 0.0) {
                    return Err(Error::InvalidSpec("log profile needs c >= 0".into()));
                }
            }
            Profile::Table { .. } | Profile::Full if self.base_dimension == 2 => {
                return Err(Error::InvalidSpec(
                    "table and full profiles are only defined over ℤ".into(),
                ));
            }
            Profile::Iid { law, .. } => law.validate()?,
            _ => {}
        }
        Ok(())
    }

    /// `α' = min(α, 2)` for power profiles.
    pub fn alpha_prime(&self) -> Option<f64> {
        match self.profile {
            Profile::Power { alpha, .. } => Some(alpha.min(2.0)),
            _ => None,
        }
    }

    /// `β' = (1 + α') / (2 + α')` for power profiles.
    pub fn beta_prime(&self) -> Option<f64> {
        self.alpha_prime().map(|a| (1.0 + a) / (2.0 + a))
    }
}

const CACHE_RADIUS: i64 = 1 << 14;
const FULL: i64 = i64::MAX;

/// Lazy adjacency of a comb. Heights near the origin are tabulated.
#[derive(Clone, Debug)]
pub struct CombOracle {
    spec: CombSpec,
    cache: Vec<i64>,
}

impl CombOracle {
    pub fn new(spec: CombSpec) -> Result<Self> {
        spec.validate()?;
        let mut oracle = CombOracle {
            spec,
            cache: Vec::new(),
        };
        if oracle.spec.base_dimension == 1 {
            oracle.cache = (-CACHE_RADIUS..=CACHE_RADIUS)
                .map(|x| oracle.compute_height(x, 0))
                .collect();
        }
        Ok(oracle)
    }

    pub fn spec(&self) -> &CombSpec {
        &self.spec
    }

    fn compute_height(&self, x1: i64, x2: i64) -> i64 {
        let norm = || ((x1 as f64).powi(2) + (x2 as f64).powi(2)).sqrt();
        let clamp = |v: f64| {
            if v >= 9.0e18 {
                FULL - 1
            } else {
                (v + 1e-9).floor().max(0.0) as i64
            }
        };
        match &self.spec.profile {
            Profile::Power { c, alpha } => {
                let r = norm();
                let base = if *alpha == 0.0 { 1.0 } else { r.powf(*alpha) };
                clamp(c * base)
            }
            Profile::Log { c } => clamp(c * (1.0 + norm()).ln()),
            Profile::Table { heights, default } => heights
                .get(&x1)
                .copied()
                .unwrap_or(*default)
                .min(FULL as u64 - 1) as i64,
            Profile::Iid { law, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(
                    seed ^ zigzag(x2).wrapping_mul(0x9E37_79B9_7F4A_7C15),
                );
                rng.set_stream(zigzag(x1));
                law.sample(&mut rng).min(FULL as u64 - 1) as i64
            }
            Profile::Full => FULL,
        }
    }

    /// Height of the tooth above spine point `x` (`i64::MAX` on the full comb).
    #[inline]
    pub fn height(&self, x: i64) -> i64 {
        if x.abs() <= CACHE_RADIUS && !self.cache.is_empty() {
            self.cache[(x + CACHE_RADIUS) as usize]
        } else {
            self.compute_height(x, 0)
        }
    }

    pub fn height2(&self, x1: i64, x2: i64) -> i64 {
        self.compute_height(x1, x2)
    }

    fn is_full(&self) -> bool {
        matches!(self.spec.profile, Profile::Full)
    }

    fn check(&self, v: &Vertex) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(Error::UnknownVertex(v.to_string()))
        }
    }
}

fn zigzag(x: i64) -> u64 {
    ((x << 1) ^ (x >> 63)) as u64
}

impl NeighborOracle for CombOracle {
    fn family(&self) -> FamilyTag {
        if self.spec.base_dimension == 2 {
            FamilyTag::Comb2
        } else {
            FamilyTag::Comb
        }
    }

    fn degree(&self, v: &Vertex) -> Result<usize> {
        self.check(v)?;
        Ok(match *v {
            Vertex::Comb { x, y } => {
                if self.is_full() {
                    if y == 0 {
                        4
                    } else {
                        2
                    }
                } else {
                    let f = self.height(x);
                    if y == 0 {
                        2 + (f >= 1) as usize
                    } else {
                        1 + (y < f) as usize
                    }
                }
            }
            Vertex::Comb2 { x1, x2, y } => {
                let f = self.height2(x1, x2);
                if y == 0 {
                    4 + (f >= 1) as usize
                } else {
                    1 + (y < f) as usize
                }
            }
            _ => unreachable!("checked"),
        })
    }

    fn neighbor(&self, v: &Vertex, i: usize) -> Result<Vertex> {
        self.check(v)?;
        let bad = || Error::UnknownVertex(format!("{v} neighbour {i}"));
        match *v {
            Vertex::Comb { x, y } => {
                let c = |x, y| Vertex::Comb { x, y };
                if self.is_full() {
                    return if y == 0 {
                        [c(x - 1, 0), c(x, -1), c(x, 1), c(x + 1, 0)]
                            .get(i)
                            .copied()
                            .ok_or_else(bad)
                    } else {
                        [c(x, y - 1), c(x, y + 1)].get(i).copied().ok_or_else(bad)
                    };
                }
                let f = self.height(x);
                match (y, i) {
                    (0, 0) => Ok(c(x - 1, 0)),
                    (0, 1) if f >= 1 => Ok(c(x, 1)),
                    (0, 1) => Ok(c(x + 1, 0)),
                    (0, 2) if f >= 1 => Ok(c(x + 1, 0)),
                    (_, 0) if y > 0 => Ok(c(x, y - 1)),
                    (_, 1) if y > 0 && y < f => Ok(c(x, y + 1)),
                    _ => Err(bad()),
                }
            }
            Vertex::Comb2 { x1, x2, y } => {
                let c = |x1, x2, y| Vertex::Comb2 { x1, x2, y };
                let f = self.height2(x1, x2);
                if y == 0 {
                    let mut n = [
                        c(x1 - 1, x2, 0),
                        c(x1, x2 - 1, 0),
                        c(x1, x2, 1),
                        c(x1, x2 + 1, 0),
                        c(x1 + 1, x2, 0),
                    ];
                    if f < 1 {
                        n.copy_within(3..5, 2);
                        return n[..4].get(i).copied().ok_or_else(bad);
                    }
                    n.get(i).copied().ok_or_else(bad)
                } else {
                    match i {
                        0 => Ok(c(x1, x2, y - 1)),
                        1 if y < f => Ok(c(x1, x2, y + 1)),
                        _ => Err(bad()),
                    }
                }
            }
            _ => Err(bad()),
        }
    }

    fn contains(&self, v: &Vertex) -> bool {
        match (*v, self.spec.base_dimension) {
            (Vertex::Comb { x, y }, 1) => self.is_full() || (y >= 0 && y <= self.height(x)),
            (Vertex::Comb2 { x1, x2, y }, 2) => y >= 0 && y <= self.height2(x1, x2),
            _ => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{ball_region, extract_region, probe_oracle, random_probes, FiniteRegion};

    #[test]
    fn wedge_alpha_one_degrees() {
        let comb = CombOracle::new(CombSpec::wedge(1.0)).unwrap();
        assert_eq!(comb.degree(&Vertex::comb(0, 0)).unwrap(), 2);
        assert_eq!(
            comb.neighbors(&Vertex::comb(2, 1)).unwrap(),
            vec![Vertex::comb(2, 0), Vertex::comb(2, 2)]
        );
        assert_eq!(comb.degree(&Vertex::comb(2, 2)).unwrap(), 1);
        assert!(comb.degree(&Vertex::comb(2, 3)).is_err());
    }

    #[test]
    fn full_comb_spine_has_degree_four() {
        let comb = CombOracle::new(CombSpec::full()).unwrap();
        for x in -5..5 {
            assert_eq!(comb.degree(&Vertex::comb(x, 0)).unwrap(), 4);
        }
        assert_eq!(comb.degree(&Vertex::comb(3, -7)).unwrap(), 2);
    }

    #[test]
    fn flat_profile_is_the_line() {
        let comb = CombOracle::new(CombSpec::power(0.0, 0.0)).unwrap();
        assert_eq!(
            comb.neighbors(&Vertex::comb(4, 0)).unwrap(),
            vec![Vertex::comb(3, 0), Vertex::comb(5, 0)]
        );
        assert!(!comb.contains(&Vertex::comb(0, 1)));
    }

    #[test]
    fn integer_powers_are_exact() {
        let comb = CombOracle::new(CombSpec::wedge(3.0)).unwrap();
        for x in 0..200i64 {
            assert_eq!(comb.height(x), x.pow(3));
            assert_eq!(comb.height(-x), x.pow(3));
        }
        let comb = CombOracle::new(CombSpec::wedge(3.0)).unwrap();
        assert_eq!(comb.height(CACHE_RADIUS + 1), (CACHE_RADIUS + 1).pow(3));
    }

    #[test]
    fn derived_exponents() {
        let s = CombSpec::wedge(3.0);
        assert_eq!(s.alpha_prime(), Some(2.0));
        assert_eq!(s.beta_prime(), Some(0.75));
        let s = CombSpec::wedge(1.5);
        assert!((s.beta_prime().unwrap() - 5.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn negative_alpha_is_rejected() {
        assert!(CombOracle::new(CombSpec::wedge(-0.5)).is_err());
        assert!(CombOracle::new(CombSpec {
            profile: Profile::Full,
            base_dimension: 2
        })
        .is_err());
    }

    #[test]
    fn slab_and_ball_counts() {
        let comb = CombOracle::new(CombSpec::wedge(1.0)).unwrap();
        let slab = FiniteRegion::new(
            Vertex::comb(0, 0),
            "slab",
            |v| matches!(v, Vertex::Comb { x, .. } if x.abs() <= 2),
        );
        let g = extract_region(&comb, &slab, 1000).unwrap();
        assert_eq!(g.interior_count(), 11);
        let mut b: Vec<_> = g.boundary().iter().map(|&i| g.vertex(i)).collect();
        b.sort();
        assert_eq!(b, vec![Vertex::comb(-3, 0), Vertex::comb(3, 0)]);

        let ball = ball_region(&comb, Vertex::comb(0, 0), 2, 1000).unwrap();
        let g = extract_region(&comb, &ball, 1000).unwrap();
        let mut inside: Vec<_> = g.interior_indices().iter().map(|&i| g.vertex(i)).collect();
        inside.sort();
        let mut expected = vec![
            Vertex::comb(0, 0),
            Vertex::comb(-1, 0),
            Vertex::comb(1, 0),
            Vertex::comb(-2, 0),
            Vertex::comb(2, 0),
            Vertex::comb(-1, 1),
            Vertex::comb(1, 1),
        ];
        expected.sort();
        assert_eq!(inside, expected);
    }

    #[test]
    fn iid_profile_is_a_pure_function_of_seed() {
        let spec = |seed| CombSpec {
            profile: Profile::Iid {
                law: HeightLaw::Geometric { p: 0.3 },
                seed,
            },
            base_dimension: 1,
        };
        let a = CombOracle::new(spec(7)).unwrap();
        let b = CombOracle::new(spec(7)).unwrap();
        let c = CombOracle::new(spec(8)).unwrap();
        let ha: Vec<_> = (-50..50).map(|x| a.height(x)).collect();
        let hb: Vec<_> = (-50..50).map(|x| b.height(x)).collect();
        let hc: Vec<_> = (-50..50).map(|x| c.height(x)).collect();
        assert_eq!(ha, hb);
        assert_ne!(ha, hc);
        assert!(ha.iter().all(|&h| h >= 1));
    }

    #[test]
    fn every_profile_passes_oracle_probes() {
        let specs = vec![
            CombSpec::wedge(1.0),
            CombSpec::wedge(2.5),
            CombSpec::power(2.0, 0.5),
            CombSpec::full(),
            CombSpec {
                profile: Profile::Log { c: 3.0 },
                base_dimension: 2,
            },
            CombSpec {
                profile: Profile::Power { c: 1.0, alpha: 1.0 },
                base_dimension: 2,
            },
            CombSpec {
                profile: Profile::Iid {
                    law: HeightLaw::Pareto { exponent: 1.2 },
                    seed: 3,
                },
                base_dimension: 1,
            },
            CombSpec {
                profile: Profile::Table {
                    heights: BTreeMap::from([(0, 3), (2, 1)]),
                    default: 0,
                },
                base_dimension: 1,
            },
        ];
        for spec in specs {
            let start = if spec.base_dimension == 2 {
                Vertex::Comb2 { x1: 0, x2: 0, y: 0 }
            } else {
                Vertex::comb(0, 0)
            };
            let comb = CombOracle::new(spec.clone()).unwrap();
            let probes = random_probes(&comb, start, 1000, 11);
            probe_oracle(&comb, &probes).unwrap_or_else(|e| panic!("{spec:?}: {e}"));
        }
    }
}
