//! Exact power-law bookkeeping for products of distance powers.
//!
//! A product `∏|x-a_i|^{e_i}` behaves like `|x-a_i|^{e_i}` near `a_i` (every
//! other factor is bounded above and below there) and like `|x|^{Σe_i}` at
//! infinity. It is in `L¹(R^N)` iff every local exponent exceeds `-N` and the
//! exponent at infinity is below `-N`; equality at either end diverges
//! logarithmically.

use std::fmt;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::Rational;

/// Local exponents at each pole plus the decay exponent at infinity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SingularProfile {
    #[serde(serialize_with = "crate::exponents::ser_rationals")]
    pub local_exponents: Vec<Rational>,
    #[serde(serialize_with = "crate::exponents::ser_rational")]
    pub infinity_exponent: Rational,
}

impl SingularProfile {
    pub fn len(&self) -> usize {
        self.local_exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.local_exponents.is_empty()
    }
}

/// Profile of `∏|x-a_i|^{e_i}`.
pub fn singular_profile(exponents: &[Rational]) -> SingularProfile {
    SingularProfile {
        local_exponents: exponents.to_vec(),
        infinity_exponent: exponents.iter().sum(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "at", content = "index")]
pub enum Location {
    Pole(usize),
    Infinity,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Pole(i) => write!(f, "pole a_{}", i + 1),
            Location::Infinity => write!(f, "infinity"),
        }
    }
}

/// Outcome of the `L¹` test, naming the first failing location.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntegrabilityVerdict {
    pub integrable: bool,
    pub failing: Option<Location>,
    pub borderline: bool,
    pub reason: String,
}

pub fn is_integrable(profile: &SingularProfile, dimension: usize) -> IntegrabilityVerdict {
    let minus_n = -Rational::from_integer(dimension as i64);
    for (i, e) in profile.local_exponents.iter().enumerate() {
        if *e <= minus_n {
            let borderline = *e == minus_n;
            let loc = Location::Pole(i);
            let reason = if borderline {
                format!("{loc}, borderline log divergence")
            } else {
                format!("{loc}, local exponent {e} < -{dimension}")
            };
            return IntegrabilityVerdict {
                integrable: false,
                failing: Some(loc),
                borderline,
                reason,
            };
        }
    }
    let q = profile.infinity_exponent;
    if q >= minus_n {
        let borderline = q == minus_n;
        let reason = if borderline {
            "infinity, borderline log divergence".to_string()
        } else {
            format!("infinity, decay exponent {q} > -{dimension}")
        };
        return IntegrabilityVerdict {
            integrable: false,
            failing: Some(Location::Infinity),
            borderline,
            reason,
        };
    }
    IntegrabilityVerdict {
        integrable: true,
        failing: None,
        borderline: false,
        reason: "integrable".to_string(),
    }
}

/// The seven function classes in the expansion of `|Δφ|²`, each `φ²` times
/// inverse even powers of distances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::A,
        Family::B,
        Family::C,
        Family::D,
        Family::E,
        Family::F,
        Family::G,
    ];

    /// Powers of the inverse distances, one per index.
    pub fn inverse_powers(self) -> &'static [i64] {
        match self {
            Family::A => &[4],
            Family::B => &[2, 2],
            Family::C => &[4, 2],
            Family::D => &[2, 2, 2],
            Family::E => &[4, 4],
            Family::F => &[2, 2, 2, 2],
            Family::G => &[4, 2, 2],
        }
    }

    pub fn arity(self) -> usize {
        self.inverse_powers().len()
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::A => "a",
            Family::B => "b",
            Family::C => "c",
            Family::D => "d",
            Family::E => "e",
            Family::F => "f",
            Family::G => "g",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Exponent vector of `φ²·∏_m |x-a_{idx_m}|^{-p_m}` with `φ = ∏|x-a_i|^{(4-N)/n}`.
///
/// Repeated indices are merged by adding their powers.
pub fn family_exponents(dimension: usize, poles: usize, family: Family, indices: &[usize]) -> Result<Vec<Rational>> {
    if indices.len() != family.arity() {
        return Err(Error::Precondition(format!(
            "family {family} takes {} indices, got {}",
            family.arity(),
            indices.len()
        )));
    }
    if let Some(bad) = indices.iter().find(|&&i| i >= poles) {
        return Err(Error::Precondition(format!("pole index {bad} out of range")));
    }
    let mut e = ground_state_exponents(dimension, poles)
        .into_iter()
        .map(|w| w * 2)
        .collect::<Vec<_>>();
    for (&i, &p) in indices.iter().zip(family.inverse_powers()) {
        e[i] -= Rational::from_integer(p);
    }
    Ok(e)
}

/// Exponents `(4-N)/n` of the fourth-order ground state.
pub fn ground_state_exponents(dimension: usize, poles: usize) -> Vec<Rational> {
    vec![Rational::new(4 - dimension as i64, poles as i64); poles]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum FamilyStatus {
    Integrable,
    NotIntegrable {
        reason: String,
    },
    /// The family needs more distinct poles than the configuration has.
    Inapplicable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyVerdict {
    pub family: Family,
    #[serde(flatten)]
    pub status: FamilyStatus,
    /// Family whose profile the merged repeated-index instance coincides with.
    pub collapsed_to: Option<Family>,
    /// Profile of the worst instance (the first failing one, if any).
    pub profile: Option<SingularProfile>,
}

impl FamilyVerdict {
    pub fn is_integrable(&self) -> bool {
        self.status == FamilyStatus::Integrable
    }

    pub fn is_applicable(&self) -> bool {
        self.status != FamilyStatus::Inapplicable
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassificationTable {
    pub dimension: usize,
    pub poles: usize,
    pub rows: Vec<FamilyVerdict>,
}

impl ClassificationTable {
    pub fn get(&self, family: Family) -> &FamilyVerdict {
        self.rows
            .iter()
            .find(|r| r.family == family)
            .expect("every family has a row")
    }

    pub fn all_applicable_integrable(&self) -> bool {
        self.rows
            .iter()
            .filter(|r| r.is_applicable())
            .all(FamilyVerdict::is_integrable)
    }

    pub fn non_integrable(&self) -> Vec<Family> {
        self.rows
            .iter()
            .filter(|r| matches!(r.status, FamilyStatus::NotIntegrable { .. }))
            .map(|r| r.family)
            .collect()
    }
}

/// Integrability of the seven classes for `N` and `n` poles.
///
/// Every instance with distinct indices is checked. With only two poles the
/// `g` class can only occur with `j = k`, which merges into the `e` profile;
/// the other classes needing more distinct poles than available are
/// inapplicable.
pub fn classify_seven_families(dimension: usize, poles: usize) -> Result<ClassificationTable> {
    if dimension < crate::multipole::MIN_DIMENSION {
        return Err(Error::DimensionTooSmall {
            dimension,
            required: crate::multipole::MIN_DIMENSION,
        });
    }
    if poles < 2 {
        return Err(Error::TooFewPoles {
            got: poles,
            required: 2,
        });
    }
    let mut rows = Vec::with_capacity(7);
    for family in Family::ALL {
        let (instances, collapsed_to) = if poles >= family.arity() {
            (distinct_tuples(poles, family.arity()), None)
        } else if family == Family::G {
            (vec![vec![0, 1, 1]], Some(Family::E))
        } else {
            rows.push(FamilyVerdict {
                family,
                status: FamilyStatus::Inapplicable,
                collapsed_to: None,
                profile: None,
            });
            continue;
        };
        let mut verdict = None;
        let mut first_profile = None;
        for idx in &instances {
            let profile = singular_profile(&family_exponents(dimension, poles, family, idx)?);
            let v = is_integrable(&profile, dimension);
            if !v.integrable {
                verdict = Some((v, profile));
                break;
            }
            first_profile.get_or_insert(profile);
        }
        rows.push(match verdict {
            Some((v, profile)) => FamilyVerdict {
                family,
                status: FamilyStatus::NotIntegrable { reason: v.reason },
                collapsed_to,
                profile: Some(profile),
            },
            None => FamilyVerdict {
                family,
                status: FamilyStatus::Integrable,
                collapsed_to,
                profile: first_profile,
            },
        });
    }
    Ok(ClassificationTable { dimension, poles, rows })
}

fn distinct_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in 0..n {
            if !cur.contains(&i) {
                cur.push(i);
                rec(n, k, cur, out);
                cur.pop();
            }
        }
    }
    rec(n, k, &mut cur, &mut out);
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Attainability {
    pub attained: bool,
    /// Exponents of the candidate minimizer `∏|x-a_i|^{(4-N)/n}`.
    #[serde(serialize_with = "crate::exponents::ser_rationals")]
    pub witness: Vec<Rational>,
    pub table: ClassificationTable,
}

/// The fourth-order sharp constant is attained iff every applicable class in
/// the expansion of `|Δφ|²` is integrable.
pub fn attainability_verdict(dimension: usize, poles: usize) -> Result<Attainability> {
    let table = classify_seven_families(dimension, poles)?;
    Ok(Attainability {
        attained: table.all_applicable_integrable(),
        witness: ground_state_exponents(dimension, poles),
        table,
    })
}

/// Whether the profile has any singular pole at all.
pub fn has_singular_pole(profile: &SingularProfile) -> bool {
    profile.local_exponents.iter().any(|e| *e < Rational::zero())
}

pub(crate) fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    match text.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().ok()?;
            let q: i64 = q.trim().parse().ok()?;
            (q != 0).then(|| Rational::new(p, q))
        }
        None => text.parse::<i64>().ok().map(Rational::from_integer),
    }
}

pub(crate) fn de_rational<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
    let text = <String as serde::Deserialize>::deserialize(d)?;
    parse_rational(&text).ok_or_else(|| serde::de::Error::custom(format!("not a rational: {text:?}")))
}

pub(crate) fn ser_rationals<S: serde::Serializer>(rs: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(rs.iter().map(|r| r.to_string()))
}
