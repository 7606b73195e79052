//! Elimination arguments applied to dimension profiles.
//!
//! Each filter is an independent necessary condition for a profile to be the
//! dimension datum of a modular category. The pipeline reports the first
//! decisive verdict; survivors are marked as needing an external theorem.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::numeric::{BigInt, DimensionProfile};

pub const CITE_EG: &str = "[EG] Etingof and Gelaki, Lemma 1.2: dim(C)/FPdim(X)^2 is an integer";
pub const CITE_MNSD_PAIRING: &str =
    "[HR] Hong and Rowell, Theorem 2.2: non-unit simples of an odd-dimensional category pair with their distinct duals";
pub const CITE_ENO_INVERTIBLES: &str =
    "[ENO] Etingof, Nikshych and Ostrik, Prop. 8.15: the number of invertibles divides dim(C)";
pub const CITE_GN: &str =
    "[GN] Gelaki and Nikshych: faithful grading by the universal grading group, isomorphic to the group of invertibles";

/// Which family of categories a profile is tested against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    #[default]
    Integral,
    /// Odd-dimensional, all non-unit simples non-self-dual.
    Mnsd,
}

impl Family {
    pub fn from_weight(ell: u32) -> Family {
        if ell == 2 {
            Family::Mnsd
        } else {
            Family::Integral
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictStatus {
    Pointed,
    Eliminated,
    Survives,
}

impl fmt::Display for VerdictStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictStatus::Pointed => "pointed",
            VerdictStatus::Eliminated => "eliminated",
            VerdictStatus::Survives => "survives",
        })
    }
}

/// Pipeline stage that produced a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Pointed,
    Congruence,
    RuleTable,
    Grading,
    Pipeline,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterVerdict {
    pub status: VerdictStatus,
    pub stage: Stage,
    pub reason: String,
    pub citation: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Value>,
}

impl FilterVerdict {
    fn survives(stage: Stage, reason: impl Into<String>) -> Self {
        FilterVerdict {
            status: VerdictStatus::Survives,
            stage,
            reason: reason.into(),
            citation: String::new(),
            witness: None,
        }
    }

    fn eliminated(
        stage: Stage,
        reason: impl Into<String>,
        citation: impl Into<String>,
        witness: Option<Value>,
    ) -> Self {
        let (reason, citation) = (reason.into(), citation.into());
        debug_assert!(!reason.is_empty() && !citation.is_empty());
        FilterVerdict {
            status: VerdictStatus::Eliminated,
            stage,
            reason,
            citation,
            witness,
        }
    }

    pub fn is_eliminated(&self) -> bool {
        self.status == VerdictStatus::Eliminated
    }

    pub fn is_decisive(&self) -> bool {
        self.status != VerdictStatus::Survives
    }
}

fn num(v: &BigInt) -> Value {
    match v.to_i64() {
        Some(i) => json!(i),
        None => json!(v.to_string()),
    }
}

pub fn check_pointed(p: &DimensionProfile) -> bool {
    p.is_pointed()
}

/// Universal-grading feasibility.
///
/// The invertible objects form the grading group `U`, every component of the
/// faithful grading has dimension `dim / |U|`, and every simple object lies
/// in exactly one component. So the multiset `{d^2}` must split into `|U|`
/// parts of equal sum.
pub fn grading_filter(p: &DimensionProfile) -> FilterVerdict {
    let g = BigInt::from(p.unit_multiplicity());
    let total = p.total_dim();
    let (part, rem) = total.div_rem(&g);
    if !rem.is_zero() {
        return FilterVerdict::eliminated(
            Stage::Grading,
            format!(
                "{g} invertible objects do not divide dim {total}; no consistent grading exists"
            ),
            CITE_GN,
            Some(json!({ "invertibles": num(&g), "dim": num(total) })),
        );
    }
    let largest = p.max_dimension();
    let largest_sq = largest * largest;
    if largest_sq > part {
        return FilterVerdict::eliminated(
            Stage::Grading,
            format!(
                "component containing a simple of dimension {largest} has dimension >= {largest_sq} > {total}/{g} = {part}; no consistent grading exists"
            ),
            CITE_GN,
            Some(json!({ "dimension": num(largest), "component_dim": num(&part), "invertibles": num(&g) })),
        );
    }
    match equal_partition(p, &part) {
        Some(parts) => FilterVerdict {
            witness: Some(json!({ "component_dim": num(&part), "components": parts })),
            ..FilterVerdict::survives(
                Stage::Grading,
                format!("dimensions split into {g} components of dimension {part}"),
            )
        },
        None => FilterVerdict::eliminated(
            Stage::Grading,
            format!("squared dimensions admit no split into {g} components of dimension {part}; no consistent grading exists"),
            CITE_GN,
            Some(json!({ "component_dim": num(&part), "invertibles": num(&g) })),
        ),
    }
}

/// Places the non-unit squared dimensions into `|U|` bins of capacity `part`;
/// the unit-dimension objects then fill the remaining gaps exactly, since
/// the totals agree. Returns each component's non-unit dimensions on success.
fn equal_partition(p: &DimensionProfile, part: &BigInt) -> Option<Vec<Vec<Value>>> {
    let bins = p.unit_multiplicity() as usize;
    let mut items: Vec<BigInt> = Vec::new();
    for (d, &k) in p.multiplicities().iter().rev() {
        if !d.is_one() {
            items.extend(std::iter::repeat_n(d.clone(), k as usize));
        }
    }
    let mut loads = vec![BigInt::zero(); bins];
    let mut assign = vec![0usize; items.len()];

    fn place(
        idx: usize,
        items: &[BigInt],
        loads: &mut [BigInt],
        assign: &mut [usize],
        part: &BigInt,
    ) -> bool {
        if idx == items.len() {
            return true;
        }
        let sq = &items[idx] * &items[idx];
        // Equal items go to non-decreasing bins; equal loads are interchangeable.
        let start = if idx > 0 && items[idx] == items[idx - 1] {
            assign[idx - 1]
        } else {
            0
        };
        let mut tried: Vec<BigInt> = Vec::new();
        for b in start..loads.len() {
            if tried.contains(&loads[b]) {
                continue;
            }
            tried.push(loads[b].clone());
            if &loads[b] + &sq > *part {
                continue;
            }
            loads[b] += &sq;
            assign[idx] = b;
            if place(idx + 1, items, loads, assign, part) {
                return true;
            }
            loads[b] -= &sq;
        }
        false
    }

    if !place(0, &items, &mut loads, &mut assign, part) {
        return None;
    }
    let mut comps: BTreeMap<usize, Vec<Value>> = BTreeMap::new();
    for (item, b) in items.iter().zip(&assign) {
        comps.entry(*b).or_default().push(num(item));
    }
    Some(comps.into_values().collect())
}

/// Counting congruences on multiplicities.
///
/// Always: `sum_{j != i} k_j d_j^2 = 0 mod d_i^2` for every dimension.
/// For odd-dimensional profiles additionally: `k_1` odd, every other
/// multiplicity even, and `sum_{d != 1} k_d d^2 = 0 mod k_1`.
pub fn congruence_filter(p: &DimensionProfile, family: Family) -> FilterVerdict {
    let total = p.total_dim();
    let k0 = p.unit_multiplicity();
    if family == Family::Mnsd {
        if k0.is_multiple_of(2) {
            return FilterVerdict::eliminated(
                Stage::Congruence,
                format!("k_0 = {k0} violates k_0 = 1 mod 2"),
                CITE_MNSD_PAIRING,
                Some(json!({ "dimension": 1, "multiplicity": k0 })),
            );
        }
        if let Some((d, k)) = p
            .multiplicities()
            .iter()
            .find(|(d, k)| !d.is_one() && *k % 2 == 1)
        {
            return FilterVerdict::eliminated(
                Stage::Congruence,
                format!("k_{d} = {k} violates k_i = 0 mod 2"),
                CITE_MNSD_PAIRING,
                Some(json!({ "dimension": num(d), "multiplicity": k })),
            );
        }
    }
    for (d, &k) in p.multiplicities() {
        let sq = d * d;
        let others = total - &sq * BigInt::from(k);
        if !others.is_multiple_of(&sq) {
            return FilterVerdict::eliminated(
                Stage::Congruence,
                format!("sum_(j != i) k_j d_j^2 = {others} is not 0 mod d_i^2 = {sq}"),
                CITE_EG,
                Some(json!({ "dimension": num(d), "residue": num(&others.mod_floor(&sq)) })),
            );
        }
    }
    if family == Family::Mnsd {
        let k0_big = BigInt::from(k0);
        let others = total - &k0_big;
        if !others.is_multiple_of(&k0_big) {
            return FilterVerdict::eliminated(
                Stage::Congruence,
                format!("sum_(j != 0) k_j d_j^2 = {others} is not 0 mod k_0 = {k0}"),
                CITE_ENO_INVERTIBLES,
                Some(json!({ "k0": k0, "residue": num(&others.mod_floor(&k0_big)) })),
            );
        }
    }
    FilterVerdict::survives(Stage::Congruence, "all congruences hold")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Conclusion {
    /// Any profile matching the predicate is impossible.
    Eliminated,
    /// A matching profile is impossible unless it is pointed.
    MustBePointed,
}

/// Conditions a profile must meet for a rule to fire. Absent fields match
/// anything.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RulePredicate {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank_min: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank_max: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit_multiplicity_min: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit_multiplicity_max: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pointed: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,
}

impl RulePredicate {
    pub fn matches(&self, p: &DimensionProfile, family: Family) -> bool {
        let k0 = p.unit_multiplicity();
        self.dim.is_none_or(|d| *p.total_dim() == BigInt::from(d))
            && self.rank_min.is_none_or(|r| p.rank() >= r)
            && self.rank_max.is_none_or(|r| p.rank() <= r)
            && self.unit_multiplicity_min.is_none_or(|m| k0 >= m)
            && self.unit_multiplicity_max.is_none_or(|m| k0 <= m)
            && self.pointed.is_none_or(|b| p.is_pointed() == b)
            && self.family.is_none_or(|f| f == family)
    }
}

/// An external classification theorem encoded as data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TheoremRule {
    pub name: String,
    #[serde(default)]
    pub when: RulePredicate,
    pub conclusion: Conclusion,
    pub citation: String,
}

impl TheoremRule {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(format!("rule '{}': {m}", self.name)));
        if self.name.trim().is_empty() {
            return Err(Error::Config("rule without a name".into()));
        }
        if self.citation.trim().is_empty() {
            return bad("citation must not be empty");
        }
        let w = &self.when;
        if let (Some(a), Some(b)) = (w.rank_min, w.rank_max) {
            if a > b {
                return bad("rank_min exceeds rank_max");
            }
        }
        if let (Some(a), Some(b)) = (w.unit_multiplicity_min, w.unit_multiplicity_max) {
            if a > b {
                return bad("unit_multiplicity_min exceeds unit_multiplicity_max");
            }
        }
        if w.dim == Some(0) || w.rank_max == Some(0) {
            return bad("dimension and rank bounds must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RuleFile {
    #[serde(rename = "rule", default)]
    rules: Vec<TheoremRule>,
}

/// Parses a rule table in TOML form (`[[rule]]` entries).
pub fn parse_rules(text: &str) -> Result<Vec<TheoremRule>> {
    let file: RuleFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    for r in &file.rules {
        r.validate()?;
    }
    Ok(file.rules)
}

pub fn rules_to_toml(rules: &[TheoremRule]) -> String {
    toml::to_string(&RuleFile {
        rules: rules.to_vec(),
    })
    .expect("rule tables serialize")
}

/// Shipped rule table: the classification results used to settle ranks up to 6.
pub fn default_rules() -> Vec<TheoremRule> {
    vec![
        TheoremRule {
            name: "rank-at-most-5".into(),
            when: RulePredicate {
                rank_max: Some(5),
                family: Some(Family::Integral),
                ..Default::default()
            },
            conclusion: Conclusion::MustBePointed,
            citation: "[RSW] Rowell, Stong and Wang, On classification of modular tensor categories; [HR] Hong and Rowell, On the classification of the Grothendieck rings of non-self-dual modular categories: integral modular categories of rank at most 5 are pointed".into(),
        },
        TheoremRule {
            name: "dim-12".into(),
            when: RulePredicate { dim: Some(12), ..Default::default() },
            conclusion: Conclusion::MustBePointed,
            citation: "[propF, Prop. 4.11] Naidu and Rowell, A finiteness property for braided fusion categories: integral modular categories of FP-dimension 12 are pointed".into(),
        },
        TheoremRule {
            name: "dim-36-invertible".into(),
            when: RulePredicate {
                dim: Some(36),
                unit_multiplicity_max: Some(1),
                ..Default::default()
            },
            conclusion: Conclusion::Eliminated,
            citation: "[ENO2, Prop. 8.2] Etingof, Nikshych and Ostrik, Weakly group-theoretical and solvable fusion categories: a fusion category of dimension 36 is solvable and contains a non-trivial invertible object".into(),
        },
    ]
}

pub fn rule_table_filter(
    p: &DimensionProfile,
    family: Family,
    rules: &[TheoremRule],
) -> Result<FilterVerdict> {
    for rule in rules {
        rule.validate()?;
        if !rule.when.matches(p, family) {
            continue;
        }
        let reason = match rule.conclusion {
            Conclusion::Eliminated => format!("rule '{}' excludes this profile", rule.name),
            Conclusion::MustBePointed if !p.is_pointed() => {
                format!(
                    "rule '{}' forces pointedness but the profile is not pointed",
                    rule.name
                )
            }
            Conclusion::MustBePointed => continue,
        };
        return Ok(FilterVerdict::eliminated(
            Stage::RuleTable,
            reason,
            rule.citation.clone(),
            Some(json!({ "rule": rule.name })),
        ));
    }
    Ok(FilterVerdict::survives(Stage::RuleTable, "no rule applies"))
}

/// All stage verdicts in pipeline order, stopping after the first decisive one.
pub fn run_filter_trail(
    p: &DimensionProfile,
    family: Family,
    rules: &[TheoremRule],
) -> Result<Vec<FilterVerdict>> {
    let mut trail = Vec::with_capacity(4);
    if check_pointed(p) {
        trail.push(FilterVerdict {
            status: VerdictStatus::Pointed,
            stage: Stage::Pointed,
            reason: "every simple object has dimension 1".into(),
            citation: String::new(),
            witness: None,
        });
        return Ok(trail);
    }
    let c = congruence_filter(p, family);
    let stop = c.is_decisive();
    trail.push(c);
    if stop {
        return Ok(trail);
    }
    let r = rule_table_filter(p, family, rules)?;
    let stop = r.is_decisive();
    trail.push(r);
    if stop {
        return Ok(trail);
    }
    let g = grading_filter(p);
    let stop = g.is_decisive();
    trail.push(g);
    if !stop {
        trail.push(FilterVerdict::survives(
            Stage::Pipeline,
            "requires external theorem: no implemented argument eliminates this profile",
        ));
    }
    Ok(trail)
}

/// Pointedness, congruences, rule table, grading, in that order; the first
/// decisive verdict wins.
pub fn run_filter_pipeline(
    p: &DimensionProfile,
    family: Family,
    rules: &[TheoremRule],
) -> Result<FilterVerdict> {
    Ok(run_filter_trail(p, family, rules)?
        .pop()
        .expect("trail is never empty"))
}
