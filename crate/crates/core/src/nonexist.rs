//! The vanishing cascade: forced coefficient vanishings for polynomials `F`
//! over `U` whose image `(Sym^d M)(F)` under the Atiyah matrix is regular on
//! `V`, recorded as a replayable certificate.
//!
//! For a monomial `t^u`, `[t^u](Sym^d M)(F) = sum_c omega^c P_c` where each
//! `P_c` is an integer combination of the coefficients `a_v` of `F`, all
//! regular on `U`. The rules:
//!
//! * scalar-by-intersection: `P_c = 0` for every `c >= 1`, so `a_u` is
//!   regular on both charts and therefore constant.
//! * zero-by-omega-rigidity: `P_c = 0` for `c >= 2` and `P_1 = m a_v` for a
//!   constant `a_v` with `m != 0` in the base field. Since `h + c omega` is
//!   never regular on `V` for `h` regular on `U` and `c != 0`, `a_v = 0`.
//! * omega-relation: as above but `P_1` combines several constants; the
//!   combination must vanish.
//! * zero-by-elimination: a combination of recorded relations equals a
//!   single coefficient.
//! * g-vanish: bookkeeping for the coupled system of the common-zero chain.
//!
//! A part `P_c` counts as zero when all its coefficients are zero, or when
//! they are constants and `P_c` is a cited combination of relations. With
//! [`RuleSet::Strict`] only zero statuses count and only intersection,
//! single-variable rigidity and g-vanish are used.
//!
//! In characteristic `p` binomial multipliers can vanish; such terms drop out
//! of the expansion and never carry a deduction.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::rc::Rc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bundles::BundleDescriptor;
use crate::error::{Error, Result};
use crate::poly_sym::{atiyah_expansion, ExponentVector};
use crate::scalar::{BaseField, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoeffStatus {
    Unknown,
    Scalar,
    Zero,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    ScalarByIntersection,
    ZeroByOmegaRigidity,
    OmegaRelation,
    ZeroByElimination,
    /// `[t^u] G_slot = 0` because `[t^u](Sym^d M)(F_slot)` and
    /// `[t^u] G_(slot-1)` are known to vanish.
    GVanish,
}

impl Rule {
    fn sets_zero(self) -> bool {
        matches!(self, Rule::ZeroByOmegaRigidity | Rule::ZeroByElimination)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::ScalarByIntersection => "scalar-by-intersection",
            Rule::ZeroByOmegaRigidity => "zero-by-omega-rigidity",
            Rule::OmegaRelation => "omega-relation",
            Rule::ZeroByElimination => "zero-by-elimination",
            Rule::GVanish => "g-vanish",
        };
        write!(f, "{s}")
    }
}

/// One term of the `omega`-expansion as seen when the step was taken.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JustificationTerm {
    pub v: Vec<u32>,
    pub omega_power: u32,
    /// Integer binomial product, as a decimal string.
    pub multiplier: String,
    pub status: CoeffStatus,
}

/// `coeff` times the relation recorded by step `step`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CombinationTerm {
    pub step: usize,
    pub coeff: String,
}

/// The part `P_c` written as a combination of earlier relations. For
/// zero-by-elimination, `omega_power` is 0 and the part is the affected
/// coefficient itself.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Citation {
    pub omega_power: u32,
    pub terms: Vec<CombinationTerm>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertStep {
    pub slot: usize,
    pub examined: Vec<u32>,
    pub rule: Rule,
    pub affected: Vec<u32>,
    pub justification: Vec<JustificationTerm>,
    /// For `slot > 0`: the monomial at which `G_(slot-1)` is known to vanish.
    pub premise: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cited: Vec<Citation>,
    /// Taken to unblock a scheduled step rather than as part of the schedule.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub auxiliary: bool,
}

/// A deduction the schedule wanted but the rules refused.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockedStep {
    pub slot: usize,
    pub examined: Vec<u32>,
    pub rule: Rule,
    pub target: Vec<u32>,
    pub reason: String,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Schedule {
    /// The double induction over `(r - i, k)`.
    #[default]
    Induction,
    /// Any sound order, run to a fixpoint.
    Frontier,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleSet {
    /// Intersection and single-variable rigidity only.
    Strict,
    /// Adds relations among constants. When a scheduled step is refused the
    /// induction schedule runs an auxiliary closure, which may zero coefficients
    /// outside the vanishing family but never a family member.
    #[default]
    Linear,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CascadeOptions {
    pub field: BaseField,
    pub schedule: Schedule,
    pub rules: RuleSet,
}

impl Default for CascadeOptions {
    fn default() -> CascadeOptions {
        CascadeOptions {
            field: BaseField::Rationals,
            schedule: Schedule::Induction,
            rules: RuleSet::Linear,
        }
    }
}

impl CascadeOptions {
    pub fn in_field(field: BaseField) -> CascadeOptions {
        CascadeOptions {
            field,
            ..CascadeOptions::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertHeader {
    pub rank: usize,
    pub degree: u32,
    pub field: String,
    pub slots: usize,
    pub schedule: Schedule,
    pub rules: RuleSet,
    pub complete: bool,
}

/// Ordered deduction trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VanishingCertificate {
    pub header: CertHeader,
    pub steps: Vec<CertStep>,
    pub blocked: Vec<BlockedStep>,
}

impl VanishingCertificate {
    /// Scheduled zeros of `F_slot`, in the order they were deduced.
    pub fn zero_list(&self, slot: usize) -> Vec<ExponentVector> {
        self.steps
            .iter()
            .filter(|s| s.slot == slot && s.rule.sets_zero() && !s.auxiliary)
            .map(|s| ExponentVector::new(s.affected.clone()))
            .collect()
    }

    pub fn count(&self, rule: Rule) -> usize {
        self.steps.iter().filter(|s| s.rule == rule).count()
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        let mut header = serde_json::to_value(&self.header).expect("serializable");
        header["type"] = Value::from("header");
        out.push_str(&header.to_string());
        out.push('\n');
        for (i, s) in self.steps.iter().enumerate() {
            let mut v = serde_json::to_value(s).expect("serializable");
            v["type"] = Value::from("step");
            v["index"] = Value::from(i);
            out.push_str(&v.to_string());
            out.push('\n');
        }
        for b in &self.blocked {
            let mut v = serde_json::to_value(b).expect("serializable");
            v["type"] = Value::from("blocked");
            out.push_str(&v.to_string());
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<VanishingCertificate> {
        let mut header = None;
        let mut steps = Vec::new();
        let mut blocked = Vec::new();
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let bad = |e: serde_json::Error| Error::Parse(format!("line {}: {e}", n + 1));
            let mut v: Value = serde_json::from_str(line).map_err(bad)?;
            let kind = v
                .get("type")
                .and_then(Value::as_str)
                .ok_or_else(|| Error::Parse(format!("line {}: missing type", n + 1)))?
                .to_string();
            if let Some(o) = v.as_object_mut() {
                o.remove("type");
                if kind == "step" {
                    let idx = o.remove("index").and_then(|i| i.as_u64());
                    if idx != Some(steps.len() as u64) {
                        return Err(Error::Parse(format!("line {}: step index out of sequence", n + 1)));
                    }
                }
            }
            match kind.as_str() {
                "header" if header.is_none() => header = Some(serde_json::from_value::<CertHeader>(v).map_err(bad)?),
                "step" => steps.push(serde_json::from_value::<CertStep>(v).map_err(bad)?),
                "blocked" => blocked.push(serde_json::from_value::<BlockedStep>(v).map_err(bad)?),
                other => return Err(Error::Parse(format!("line {}: unexpected `{other}` line", n + 1))),
            }
        }
        Ok(VanishingCertificate {
            header: header.ok_or_else(|| Error::Parse("missing header".into()))?,
            steps,
            blocked,
        })
    }
}

/// An expansion term with its multiplier reduced into the base field.
struct Term {
    v: ExponentVector,
    omega_power: u32,
    multiplier: String,
    reduced: Scalar,
}

type Vector = BTreeMap<ExponentVector, Scalar>;
/// Provenance of an echelon row: multiples of relation steps.
type Tag = BTreeMap<usize, Scalar>;

fn axpy(field: BaseField, acc: &mut Vector, c: &Scalar, x: &Vector) {
    for (k, y) in x {
        let e = acc.entry(k.clone()).or_insert_with(|| field.zero());
        *e = &*e + &(c * y);
    }
    acc.retain(|_, c| !c.is_zero());
}

fn axpy_tag(field: BaseField, acc: &mut Tag, c: &Scalar, x: &Tag) {
    for (k, y) in x {
        let e = acc.entry(*k).or_insert_with(|| field.zero());
        *e = &*e + &(c * y);
    }
    acc.retain(|_, c| !c.is_zero());
}

/// Reduced row echelon form of the relations of one slot, plus a unit row
/// for every zero coefficient (with empty provenance).
#[derive(Clone, Default)]
struct Echelon {
    rows: BTreeMap<ExponentVector, (Vector, Tag)>,
}

impl Echelon {
    /// Returns `(rest, tag)` with `v = rest - sum tag_s R_s` modulo zeros.
    fn reduce(&self, field: BaseField, mut v: Vector) -> (Vector, Tag) {
        let mut tag = Tag::new();
        let hits: Vec<(ExponentVector, Scalar)> = v
            .iter()
            .filter(|(k, _)| self.rows.contains_key(*k))
            .map(|(k, c)| (k.clone(), c.clone()))
            .collect();
        for (k, c) in hits {
            let (row, rtag) = &self.rows[&k];
            let neg = -&c;
            axpy(field, &mut v, &neg, row);
            axpy_tag(field, &mut tag, &neg, rtag);
        }
        (v, tag)
    }

    fn insert(&mut self, field: BaseField, v: Vector, mut tag: Tag) {
        let (v, t) = self.reduce(field, v);
        axpy_tag(field, &mut tag, &field.one(), &t);
        let Some((pivot, c)) = v.iter().next().map(|(k, c)| (k.clone(), c.clone())) else {
            return;
        };
        let inv = c.inv().expect("nonzero in a field");
        let v: Vector = v.into_iter().map(|(k, y)| (k, &y * &inv)).collect();
        let tag: Tag = tag.into_iter().map(|(k, y)| (k, &y * &inv)).collect();
        for (row, rtag) in self.rows.values_mut() {
            if let Some(c) = row.get(&pivot).cloned() {
                let neg = -&c;
                axpy(field, row, &neg, &v);
                axpy_tag(field, rtag, &neg, &tag);
            }
        }
        self.rows.insert(pivot, (v, tag));
    }

    /// Writes `target` as a combination of relations, modulo zeros.
    fn express(&self, field: BaseField, target: &Vector) -> Option<Vec<CombinationTerm>> {
        let (rest, tag) = self.reduce(field, target.clone());
        if !rest.is_empty() {
            return None;
        }
        Some(
            tag.into_iter()
                .map(|(step, c)| CombinationTerm {
                    step,
                    coeff: (-c).to_string(),
                })
                .collect(),
        )
    }
}

/// Statuses of every coefficient of `F_0..F_(slots-1)`, the known
/// vanishings of the `G_i`, and the recorded relations.
struct State {
    field: BaseField,
    status: HashMap<(usize, ExponentVector), CoeffStatus>,
    g_zero: HashMap<(usize, ExponentVector), bool>,
    relations: BTreeMap<usize, (usize, Vector)>,
    echelon: HashMap<usize, Echelon>,
    applied: usize,
    cache: Rc<RefCell<HashMap<ExponentVector, Rc<Vec<Term>>>>>,
}

impl State {
    fn new(field: BaseField) -> State {
        State {
            field,
            status: HashMap::new(),
            g_zero: HashMap::new(),
            relations: BTreeMap::new(),
            echelon: HashMap::new(),
            applied: 0,
            cache: Rc::new(RefCell::new(HashMap::new())),
        }
    }

    fn get(&self, slot: usize, v: &ExponentVector) -> CoeffStatus {
        self.status.get(&(slot, v.clone())).copied().unwrap_or(CoeffStatus::Unknown)
    }

    fn g_known_zero(&self, slot: usize, v: &ExponentVector) -> bool {
        self.g_zero.contains_key(&(slot, v.clone()))
    }

    fn expansion(&self, u: &ExponentVector) -> Rc<Vec<Term>> {
        if let Some(t) = self.cache.borrow().get(u) {
            return t.clone();
        }
        let terms: Vec<Term> = atiyah_expansion(u)
            .into_iter()
            .map(|t| Term {
                reduced: self.field.from_bigint(&t.term.multiplier),
                multiplier: t.term.multiplier.to_string(),
                omega_power: t.term.omega_power,
                v: t.v,
            })
            .collect();
        let rc = Rc::new(terms);
        self.cache.borrow_mut().insert(u.clone(), rc.clone());
        rc
    }

    fn justification(&self, slot: usize, terms: &[Term]) -> Vec<JustificationTerm> {
        terms
            .iter()
            .map(|t| JustificationTerm {
                v: t.v.entries().to_vec(),
                omega_power: t.omega_power,
                multiplier: t.multiplier.clone(),
                status: self.get(slot, &t.v),
            })
            .collect()
    }

    /// Drops zero-status coefficients and zero entries.
    fn reduce(&self, slot: usize, v: Vector) -> Vector {
        v.into_iter()
            .filter(|(k, c)| !c.is_zero() && self.get(slot, k) != CoeffStatus::Zero)
            .collect()
    }

    /// `P_c` restricted to coefficients not yet known to vanish.
    fn part(&self, slot: usize, terms: &[Term], c: u32) -> Vector {
        let out = terms
            .iter()
            .filter(|t| t.omega_power == c)
            .map(|t| (t.v.clone(), t.reduced.clone()))
            .collect();
        self.reduce(slot, out)
    }

    fn all_scalar(&self, slot: usize, v: &Vector) -> std::result::Result<(), String> {
        match v.keys().find(|k| self.get(slot, k) != CoeffStatus::Scalar) {
            Some(k) => Err(format!("a{k} is not known to be constant")),
            None => Ok(()),
        }
    }

    fn combine(&self, slot: usize, combo: &[CombinationTerm]) -> std::result::Result<Vector, String> {
        let mut acc = Vector::new();
        for c in combo {
            if c.step >= self.applied {
                return Err(format!("citation of step {} which is not earlier", c.step));
            }
            let (rslot, rel) = self
                .relations
                .get(&c.step)
                .ok_or_else(|| format!("step {} recorded no relation", c.step))?;
            if *rslot != slot {
                return Err(format!("step {} is a relation for another slot", c.step));
            }
            let k = self.field.parse(&c.coeff).map_err(|e| e.to_string())?;
            axpy(self.field, &mut acc, &k, rel);
        }
        Ok(self.reduce(slot, acc))
    }

    /// Checks that every part `P_c` with `c` in `powers` vanishes, citing
    /// relations where a part is a nonzero combination of constants.
    fn parts_vanish(
        &self,
        slot: usize,
        terms: &[Term],
        powers: impl Iterator<Item = u32>,
        cited: &[Citation],
    ) -> std::result::Result<(), String> {
        let mut used = 0;
        for c in powers {
            let p = self.part(slot, terms, c);
            let cite = cited.iter().find(|x| x.omega_power == c);
            if p.is_empty() {
                if cite.is_some() {
                    return Err(format!("citation for omega^{c}, whose part is already zero"));
                }
                continue;
            }
            let Some(cite) = cite else {
                let k = p.keys().next().unwrap();
                return Err(format!("a{k} with omega^{c} is not known to vanish"));
            };
            used += 1;
            self.all_scalar(slot, &p)?;
            if self.combine(slot, &cite.terms)? != p {
                return Err(format!("cited relations do not match the omega^{c} part"));
            }
        }
        if used != cited.len() {
            return Err("citation for a part the rule does not use".into());
        }
        Ok(())
    }

    /// Validates `step` against the current state. The single source of
    /// truth for soundness: the engine and replay both go through here.
    fn check(&self, step: &CertStep) -> std::result::Result<(), String> {
        let u = ExponentVector::new(step.examined.clone());
        let slot = step.slot;
        if step.rule == Rule::ZeroByElimination {
            if step.affected != step.examined || !step.justification.is_empty() || step.premise.is_some() {
                return Err("malformed elimination step".into());
            }
            if self.get(slot, &u) != CoeffStatus::Scalar {
                return Err(format!("a{u} is not a constant awaiting a verdict"));
            }
            let [Citation { omega_power: 0, terms }] = step.cited.as_slice() else {
                return Err("elimination cites exactly one combination".into());
            };
            let want = Vector::from([(u.clone(), self.field.one())]);
            return if self.combine(slot, terms)? == want {
                Ok(())
            } else {
                Err(format!("cited relations do not reduce to a{u}"))
            };
        }
        let expected_premise = if slot == 0 {
            None
        } else if self.g_known_zero(slot - 1, &u) {
            Some(step.examined.clone())
        } else {
            return Err(format!("[t^{u}] G_{} is not known to vanish", slot - 1));
        };
        if step.premise != expected_premise {
            return Err("premise does not match".into());
        }
        if step.affected != step.examined && step.rule != Rule::ZeroByOmegaRigidity {
            return Err(format!("{} must affect the examined coefficient", step.rule));
        }
        let terms = self.expansion(&u);
        if step.justification != self.justification(slot, &terms) {
            return Err("justification differs from the recomputed expansion".into());
        }
        let top = terms.iter().map(|t| t.omega_power).max().unwrap_or(0);
        match step.rule {
            Rule::ScalarByIntersection => {
                if self.get(slot, &u) != CoeffStatus::Unknown {
                    return Err(format!("a{u} is already known to be constant"));
                }
                self.parts_vanish(slot, &terms, 1..=top, &step.cited)
            }
            Rule::ZeroByOmegaRigidity => {
                self.parts_vanish(slot, &terms, 2..=top, &step.cited)?;
                let one = self.part(slot, &terms, 1);
                let mut keys = one.keys();
                match (keys.next(), keys.next()) {
                    (Some(v), None) if v.entries() == step.affected.as_slice() => self.all_scalar(slot, &one),
                    (Some(_), Some(_)) => Err("more than one undetermined omega term".into()),
                    (Some(v), None) => Err(format!("rigidity at {u} forces a{v}")),
                    (None, _) => Err(self.vanished_reason(slot, &terms)),
                }
            }
            Rule::OmegaRelation => {
                self.parts_vanish(slot, &terms, 2..=top, &step.cited)?;
                let one = self.part(slot, &terms, 1);
                if one.len() < 2 {
                    return Err("a relation needs at least two constants".into());
                }
                self.all_scalar(slot, &one)
            }
            Rule::GVanish => self.parts_vanish(slot, &terms, 0..=top, &step.cited),
            Rule::ZeroByElimination => unreachable!(),
        }
    }

    fn vanished_reason(&self, slot: usize, terms: &[Term]) -> String {
        match terms
            .iter()
            .find(|t| t.omega_power == 1 && t.reduced.is_zero() && self.get(slot, &t.v) != CoeffStatus::Zero)
        {
            Some(t) => format!("multiplier {} of a{} vanishes in {}", t.multiplier, t.v, self.field),
            None => "no omega term left to force".into(),
        }
    }

    fn apply(&mut self, step: &CertStep) {
        let v = ExponentVector::new(step.affected.clone());
        let field = self.field;
        match step.rule {
            Rule::ScalarByIntersection => {
                self.status.insert((step.slot, v), CoeffStatus::Scalar);
            }
            Rule::ZeroByOmegaRigidity | Rule::ZeroByElimination => {
                self.status.insert((step.slot, v.clone()), CoeffStatus::Zero);
                let unit = Vector::from([(v, field.one())]);
                self.echelon.entry(step.slot).or_default().insert(field, unit, Tag::new());
            }
            Rule::OmegaRelation => {
                let terms = self.expansion(&v);
                let rel = self.part(step.slot, &terms, 1);
                let tag = Tag::from([(self.applied, field.one())]);
                self.echelon.entry(step.slot).or_default().insert(field, rel.clone(), tag);
                self.relations.insert(self.applied, (step.slot, rel));
            }
            Rule::GVanish => {
                self.g_zero.insert((step.slot, v), true);
            }
        }
        self.applied += 1;
    }

    fn express(&self, slot: usize, target: &Vector) -> Option<Vec<CombinationTerm>> {
        match self.echelon.get(&slot) {
            Some(e) => e.express(self.field, target),
            None => target.is_empty().then(Vec::new),
        }
    }

    /// A step for `rule` at `u`, citing relations for every part that needs
    /// them when `linear`. Returns `None` if the rule cannot apply.
    fn candidate(&self, slot: usize, u: &ExponentVector, rule: Rule, affected: &ExponentVector, linear: bool) -> CertStep {
        let mut step = CertStep {
            slot,
            examined: u.entries().to_vec(),
            rule,
            affected: affected.entries().to_vec(),
            justification: Vec::new(),
            premise: None,
            cited: Vec::new(),
            auxiliary: false,
        };
        if rule == Rule::ZeroByElimination {
            let target = Vector::from([(u.clone(), self.field.one())]);
            if let Some(terms) = self.express(slot, &target) {
                step.cited.push(Citation { omega_power: 0, terms });
            }
            return step;
        }
        let terms = self.expansion(u);
        step.justification = self.justification(slot, &terms);
        step.premise = (slot > 0).then(|| u.entries().to_vec());
        if linear {
            let top = terms.iter().map(|t| t.omega_power).max().unwrap_or(0);
            let from = match rule {
                Rule::ScalarByIntersection => 1,
                Rule::GVanish => 0,
                _ => 2,
            };
            for c in from..=top {
                let p = self.part(slot, &terms, c);
                if p.is_empty() || self.all_scalar(slot, &p).is_err() {
                    continue;
                }
                if let Some(t) = self.express(slot, &p) {
                    step.cited.push(Citation { omega_power: c, terms: t });
                }
            }
        }
        step
    }
}

struct Engine {
    state: State,
    rules: RuleSet,
    steps: Vec<CertStep>,
    blocked: Vec<BlockedStep>,
}

impl Engine {
    fn new(field: BaseField, rules: RuleSet) -> Engine {
        Engine {
            state: State::new(field),
            rules,
            steps: Vec::new(),
            blocked: Vec::new(),
        }
    }

    fn linear(&self) -> bool {
        self.rules == RuleSet::Linear
    }

    fn commit(&mut self, step: CertStep) -> std::result::Result<(), String> {
        self.state.check(&step)?;
        self.state.apply(&step);
        self.steps.push(step);
        Ok(())
    }

    fn attempt(&mut self, slot: usize, u: &ExponentVector, rule: Rule, affected: &ExponentVector) -> std::result::Result<(), String> {
        let strict = self.state.candidate(slot, u, rule, affected, false);
        match self.commit(strict) {
            Ok(()) => Ok(()),
            Err(reason) if self.linear() => {
                let step = self.state.candidate(slot, u, rule, affected, true);
                self.commit(step).map_err(|_| reason)
            }
            Err(reason) => Err(reason),
        }
    }

    fn block(&mut self, slot: usize, examined: &ExponentVector, rule: Rule, target: &ExponentVector, reason: String) {
        self.blocked.push(BlockedStep {
            slot,
            examined: examined.entries().to_vec(),
            rule,
            target: target.entries().to_vec(),
            reason,
        });
    }

    fn try_relation(&mut self, slot: usize, w: &ExponentVector) -> bool {
        let one = self.state.part(slot, &self.state.expansion(w), 1);
        if one.len() < 2 || self.state.all_scalar(slot, &one).is_err() || self.state.express(slot, &one).is_some() {
            return false;
        }
        let step = self.state.candidate(slot, w, Rule::OmegaRelation, w, true);
        self.commit(step).is_ok()
    }

    fn try_elimination(&mut self, slot: usize, v: &ExponentVector) -> bool {
        if self.state.get(slot, v) != CoeffStatus::Scalar {
            return false;
        }
        let step = self.state.candidate(slot, v, Rule::ZeroByElimination, v, true);
        !step.cited.is_empty() && self.commit(step).is_ok()
    }

    fn intersection(&mut self, slot: usize, u: &ExponentVector) -> bool {
        match self.attempt(slot, u, Rule::ScalarByIntersection, u) {
            Ok(()) => true,
            Err(reason) => {
                self.block(slot, u, Rule::ScalarByIntersection, u, reason);
                false
            }
        }
    }

    /// Rigidity at `w` forcing `target`. Under [`RuleSet::Linear`] a refusal
    /// falls back to gathering relations among constants; nothing but
    /// `target` is zeroed.
    fn rigidity(&mut self, slot: usize, r: usize, d: u32, w: &ExponentVector, target: &ExponentVector) -> bool {
        let reason = match self.attempt(slot, w, Rule::ZeroByOmegaRigidity, target) {
            Ok(()) => return true,
            Err(reason) => reason,
        };
        if self.linear() && (self.assist(slot, r, d, w, target, false) || self.assist(slot, r, d, w, target, true)) {
            return true;
        }
        self.block(slot, w, Rule::ZeroByOmegaRigidity, target, reason);
        false
    }

    /// Closure over all monomials until rigidity (at `w` or elsewhere) or
    /// elimination settles `target`. Unless `early`, zeroes only coefficients
    /// outside the vanishing family. Steps taken here are marked auxiliary,
    /// except zeros of family members.
    fn assist(&mut self, slot: usize, r: usize, d: u32, w: &ExponentVector, target: &ExponentVector, early: bool) -> bool {
        if self.state.get(slot, target) != CoeffStatus::Scalar {
            return false;
        }
        let mark = self.steps.len();
        let family: std::collections::HashSet<ExponentVector> = vanishing_family(r, d).into_iter().collect();
        let all = ExponentVector::all(r + 1, d);
        let settled = |e: &mut Engine| {
            e.try_relation(slot, w);
            e.attempt(slot, w, Rule::ZeroByOmegaRigidity, target).is_ok() || e.try_elimination(slot, target)
        };
        let mut ok = settled(self);
        while !ok {
            let mut progress = false;
            for u in &all {
                if slot > 0 && !self.state.g_known_zero(slot - 1, u) {
                    continue;
                }
                let one = self.state.part(slot, &self.state.expansion(u), 1);
                if one.len() == 1 {
                    let v = one.keys().next().unwrap().clone();
                    if &v == target && self.attempt(slot, u, Rule::ZeroByOmegaRigidity, &v).is_ok() {
                        ok = true;
                        break;
                    }
                    if early || !family.contains(&v) {
                        progress |= self.attempt(slot, u, Rule::ZeroByOmegaRigidity, &v).is_ok();
                    }
                }
                if self.state.get(slot, u) == CoeffStatus::Unknown {
                    progress |= self.attempt(slot, u, Rule::ScalarByIntersection, u).is_ok();
                }
                progress |= self.try_relation(slot, u);
            }
            if ok {
                break;
            }
            let pivots: Vec<ExponentVector> = self
                .state
                .echelon
                .get(&slot)
                .map(|e| e.rows.iter().filter(|(_, (row, _))| row.len() == 1).map(|(k, _)| k.clone()).collect())
                .unwrap_or_default();
            for v in pivots.into_iter().filter(|v| v != target && (early || !family.contains(v))) {
                progress |= self.try_elimination(slot, &v);
            }
            ok = settled(self);
            if !progress {
                break;
            }
        }
        if !ok {
            self.rollback(mark);
            return false;
        }
        let n = self.steps.len();
        for s in &mut self.steps[mark..n - 1] {
            s.auxiliary = !(s.rule.sets_zero() && family.contains(&ExponentVector::new(s.affected.clone())));
        }
        true
    }

    fn rollback(&mut self, keep: usize) {
        self.steps.truncate(keep);
        let mut state = State::new(self.state.field);
        state.cache = self.state.cache.clone();
        for s in &self.steps {
            state.apply(s);
        }
        self.state = state;
    }

    fn g_vanish(&mut self, slot: usize, u: &ExponentVector) -> bool {
        match self.attempt(slot, u, Rule::GVanish, u) {
            Ok(()) => true,
            Err(reason) => {
                self.block(slot, u, Rule::GVanish, u, reason);
                false
            }
        }
    }

    /// The double induction: `u = (0, ..., 0, k, d - k - 1) + e_i` for `i`
    /// from `r` down to `0` and `k` from `0` to `d - 2`; `a_u` becomes
    /// constant, rigidity at `u - alpha_(r-1)` zeroes it, and intersection
    /// makes `a_(u - alpha_(r-1))` constant.
    fn induction_schedule(&mut self, slot: usize, r: usize, d: u32) {
        for i in (0..=r).rev() {
            for k in 0..=d - 2 {
                let u = family_member(r, d, i, k);
                if self.state.get(slot, &u) == CoeffStatus::Zero {
                    continue;
                }
                if self.state.get(slot, &u) == CoeffStatus::Unknown && !self.intersection(slot, &u) {
                    continue;
                }
                let w = u.moved(r - 1, r).expect("u has a positive last entry");
                if self.rigidity(slot, r, d, &w, &u) && self.state.get(slot, &w) == CoeffStatus::Unknown {
                    self.intersection(slot, &w);
                }
            }
        }
    }

    /// Fixpoint over all monomials in ascending order.
    fn frontier_schedule(&mut self, slot: usize, r: usize, d: u32) {
        let all = ExponentVector::all(r + 1, d);
        loop {
            let mut progress = false;
            for u in &all {
                let one = self.state.part(slot, &self.state.expansion(u), 1);
                if one.len() == 1 {
                    let v = one.keys().next().unwrap().clone();
                    progress |= self.attempt(slot, u, Rule::ZeroByOmegaRigidity, &v).is_ok();
                }
                if self.state.get(slot, u) == CoeffStatus::Unknown {
                    progress |= self.attempt(slot, u, Rule::ScalarByIntersection, u).is_ok();
                }
                if self.linear() {
                    progress |= self.try_relation(slot, u);
                }
            }
            if self.linear() {
                let pivots: Vec<ExponentVector> = self
                    .state
                    .echelon
                    .get(&slot)
                    .map(|e| e.rows.iter().filter(|(_, (row, _))| row.len() == 1).map(|(k, _)| k.clone()).collect())
                    .unwrap_or_default();
                for v in pivots {
                    progress |= self.try_elimination(slot, &v);
                }
            }
            if !progress {
                break;
            }
        }
    }

    fn finish(self, rank: usize, degree: u32, slots: usize, schedule: Schedule, complete: bool) -> VanishingCertificate {
        VanishingCertificate {
            header: CertHeader {
                rank,
                degree,
                field: self.state.field.to_string(),
                slots,
                schedule,
                rules: self.rules,
                complete,
            },
            steps: self.steps,
            blocked: self.blocked,
        }
    }
}

fn family_member(r: usize, d: u32, i: usize, k: u32) -> ExponentVector {
    let mut e = vec![0u32; r + 1];
    e[r - 1] += k;
    e[r] += d - k - 1;
    e[i] += 1;
    ExponentVector::new(e)
}

/// `(0, ..., 0, k, d - k - 1) + e_i` for `0 <= k <= d - 2`, `0 <= i <= r`,
/// without repeats, in ascending monomial order.
pub fn vanishing_family(r: usize, d: u32) -> Vec<ExponentVector> {
    if d < 2 || r == 0 {
        return Vec::new();
    }
    let mut out: Vec<ExponentVector> = (0..=r)
        .flat_map(|i| (0..=d - 2).map(move |k| family_member(r, d, i, k)))
        .collect();
    out.sort();
    out.dedup();
    out
}

fn check_rd(r: usize, d: u32) -> Result<()> {
    if r == 0 {
        return Err(Error::InvalidParameter("rank r must be at least 1".into()));
    }
    if d < 2 {
        return Err(Error::InvalidParameter(format!(
            "the cascade needs degree d >= 2, got {d}"
        )));
    }
    Ok(())
}

fn family_complete(state: &State, r: usize, d: u32) -> bool {
    vanishing_family(r, d).iter().all(|v| state.get(0, v) == CoeffStatus::Zero)
}

/// Runs the cascade for one polynomial in `t_0..t_r` of degree `d`.
pub fn run_cascade(r: usize, d: u32) -> Result<VanishingCertificate> {
    run_cascade_with(r, d, CascadeOptions::default())
}

pub fn run_cascade_with(r: usize, d: u32, opts: CascadeOptions) -> Result<VanishingCertificate> {
    check_rd(r, d)?;
    let mut e = Engine::new(opts.field, opts.rules);
    match opts.schedule {
        Schedule::Induction => e.induction_schedule(0, r, d),
        Schedule::Frontier => e.frontier_schedule(0, r, d),
    }
    let complete = family_complete(&e.state, r, d);
    Ok(e.finish(r, d, 1, opts.schedule, complete))
}

/// Proof that `[t_r^d] F_i = 0` for every `i < slots`, where
/// `(Sym^d M)(F_0) = G_0` and `(Sym^d M)(F_i) = G_i + omega G_(i-1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommonZeroProof {
    pub certificate: VanishingCertificate,
    /// Every `F_i` is proved to vanish at `[0 : ... : 0 : 1]`.
    pub concluded: bool,
}

pub fn conclude_common_zero(r: usize, d: u32) -> Result<CommonZeroProof> {
    conclude_common_zero_with(r, d, r + 1, CascadeOptions::default())
}

/// The chain for `slots` coupled polynomials (at most `r + 1`).
///
/// Slot 0 runs the cascade and then shows `[t_r^(d-1) t_j] G_0 = 0` for
/// every `j`. Slot `i >= 1` uses `[t_r^(d-1) t_j] G_(i-1) = 0` for
/// `j >= i - 1`: `a` at `t_r^d` is constant, then for `j = r - 1` down to
/// `i - 1` rigidity at `t_r^(d-1) t_j` zeroes `a` at `t_r^(d-1) t_(j+1)`
/// and intersection makes `a` at `t_r^(d-1) t_j` constant. Finally
/// `[t_r^(d-1) t_j] G_i = 0` for `j >= i`, which is what slot `i + 1` needs.
pub fn conclude_common_zero_with(r: usize, d: u32, slots: usize, opts: CascadeOptions) -> Result<CommonZeroProof> {
    check_rd(r, d)?;
    if slots == 0 || slots > r + 1 {
        return Err(Error::InvalidParameter(format!("slots must lie in 1..={}", r + 1)));
    }
    let n = r + 1;
    let near_top = |j: usize| -> ExponentVector {
        let mut e = vec![0u32; n];
        e[r] = d - 1;
        e[j] += 1;
        ExponentVector::new(e)
    };
    let mut e = Engine::new(opts.field, opts.rules);
    e.induction_schedule(0, r, d);
    for j in 0..=r {
        e.g_vanish(0, &near_top(j));
    }
    for i in 1..slots {
        e.intersection(i, &near_top(r));
        for j in (i - 1..r).rev() {
            let w = near_top(j);
            if e.rigidity(i, r, d, &w, &near_top(j + 1)) {
                e.intersection(i, &w);
            }
        }
        for j in i..=r {
            e.g_vanish(i, &near_top(j));
        }
    }
    let top = ExponentVector::unit(n, r, d);
    let concluded = (0..slots).all(|i| e.state.get(i, &top) == CoeffStatus::Zero);
    Ok(CommonZeroProof {
        certificate: e.finish(r, d, slots, Schedule::Induction, concluded),
        concluded,
    })
}

/// Re-derives every step from the empty state. Fails on the first step whose
/// rule does not apply or whose recorded data differs from the recomputation.
pub fn replay(cert: &VanishingCertificate) -> Result<()> {
    let h = &cert.header;
    let field = parse_field_tag(&h.field)?;
    check_rd(h.rank, h.degree).map_err(|e| Error::Replay { step: 0, reason: e.to_string() })?;
    if h.slots == 0 || h.slots > h.rank + 1 {
        return Err(Error::Replay { step: 0, reason: "slot count out of range".into() });
    }
    let n = h.rank + 1;
    let mut state = State::new(field);
    for (idx, s) in cert.steps.iter().enumerate() {
        let fail = |reason: String| Error::Replay { step: idx, reason };
        if s.slot >= h.slots {
            return Err(fail(format!("slot {} out of range", s.slot)));
        }
        for v in [&s.examined, &s.affected] {
            if v.len() != n || v.iter().sum::<u32>() != h.degree {
                return Err(fail("monomial has the wrong shape".into()));
            }
        }
        if h.rules == RuleSet::Strict
            && (matches!(s.rule, Rule::OmegaRelation | Rule::ZeroByElimination) || !s.cited.is_empty())
        {
            return Err(fail(format!("rule {} is not allowed under strict rules", s.rule)));
        }
        state.check(s).map_err(fail)?;
        state.apply(s);
    }
    for b in &cert.blocked {
        if b.examined.len() != n || b.target.len() != n || b.slot >= h.slots {
            return Err(Error::Replay {
                step: cert.steps.len(),
                reason: "blocked entry has the wrong shape".into(),
            });
        }
    }
    let complete = if h.slots == 1 {
        family_complete(&state, h.rank, h.degree)
    } else {
        let top = ExponentVector::unit(n, h.rank, h.degree);
        (0..h.slots).all(|i| state.get(i, &top) == CoeffStatus::Zero)
    };
    if complete != h.complete {
        return Err(Error::Replay {
            step: cert.steps.len(),
            reason: format!("header claims complete = {}, replay gives {complete}", h.complete),
        });
    }
    Ok(())
}

fn parse_field_tag(s: &str) -> Result<BaseField> {
    if s == "Q" {
        return Ok(BaseField::Rationals);
    }
    let p = s
        .strip_prefix("F_")
        .and_then(|p| p.parse::<u32>().ok())
        .ok_or_else(|| Error::Parse(format!("unknown field `{s}`")))?;
    BaseField::prime(p)
}

/// Outcome of the nonexistence argument for a bundle and fibre degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// No surjective endomorphism of this fibre degree.
    Nonexistent {
        certificates: Vec<VanishingCertificate>,
        normalization: Option<String>,
    },
    NotExcluded {
        reason: String,
    },
    /// A deduction was refused (vanishing multiplier in characteristic `p`).
    Inconclusive {
        reason: String,
        certificates: Vec<VanishingCertificate>,
    },
}

impl Verdict {
    pub fn tag(&self) -> &'static str {
        match self {
            Verdict::Nonexistent { .. } => "nonexistent",
            Verdict::NotExcluded { .. } => "not-excluded",
            Verdict::Inconclusive { .. } => "inconclusive",
        }
    }
}

pub fn nonexistence_verdict(desc: &BundleDescriptor, d: u32) -> Result<Verdict> {
    nonexistence_verdict_in(desc, d, BaseField::Rationals)
}

/// Reduces to the largest Atiyah block `F_(r_1 + 1)` by setting the other
/// coordinates to zero. Every `F_j` restricted to that block satisfies the
/// block's equations after normalizing `beta` to the transition scalar of
/// `F_j`'s own summand; a rank-1 summand gives a single cascade and a
/// summand of rank `s` gives an `s`-slot chain. Either way `[t_r^d] F_j = 0`
/// for the block's last coordinate, a common zero.
pub fn nonexistence_verdict_in(desc: &BundleDescriptor, d: u32, field: BaseField) -> Result<Verdict> {
    desc.validate()?;
    if d == 0 {
        return Err(Error::InvalidParameter("fibre degree must be positive".into()));
    }
    if d == 1 {
        return Ok(Verdict::NotExcluded {
            reason: "fibre degree 1: the identity is an endomorphism".into(),
        });
    }
    let max_rank = desc.summands.iter().map(|s| s.rank).max().unwrap_or(1);
    if max_rank == 1 {
        return Ok(Verdict::NotExcluded {
            reason: "sum of line bundles: the cascade has no Atiyah block to act on".into(),
        });
    }
    let largest = desc.summands.iter().position(|s| s.rank == max_rank).unwrap();
    let r1 = (max_rank - 1) as usize;
    let opts = CascadeOptions::in_field(field);
    let top = ExponentVector::unit(r1 + 1, r1, d);
    let mut certificates = Vec::new();
    let mut cache: BTreeMap<u32, (VanishingCertificate, bool)> = BTreeMap::new();
    let mut failed = None;
    for s in &desc.summands {
        let (cert, ok) = match cache.get(&s.rank) {
            Some(c) => c.clone(),
            None => {
                let entry = if s.rank == 1 {
                    let c = run_cascade_with(r1, d, opts)?;
                    let ok = c.header.complete || c.zero_list(0).contains(&top);
                    (c, ok)
                } else {
                    let proof = conclude_common_zero_with(r1, d, s.rank as usize, opts)?;
                    (proof.certificate, proof.concluded)
                };
                cache.insert(s.rank, entry.clone());
                entry
            }
        };
        if !ok && failed.is_none() {
            failed = Some(certificates.len());
        }
        certificates.push(cert);
    }
    let normalization = (desc.summands.len() > 1).then(|| {
        let (off, _) = desc.blocks()[largest];
        format!(
            "restricted to coordinates t_{off}..t_{} of summand {largest}; for F_j in summand b, beta is normalized to gamma_b (the first index of each summand is used)",
            off + r1
        )
    });
    match failed {
        None => Ok(Verdict::Nonexistent {
            certificates,
            normalization,
        }),
        Some(i) => {
            let reason = certificates[i]
                .blocked
                .first()
                .map(|b| b.reason.clone())
                .unwrap_or_else(|| "cascade did not close".into());
            Ok(Verdict::Inconclusive { reason, certificates })
        }
    }
}
