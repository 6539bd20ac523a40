use std::collections::BTreeSet;

use super::{CredalEntry, KnowledgeBase, Relation, SymbolicError, MAX_ENUMERATION_ATOMS};
use crate::lang::{Atom, Formula};

// Two credences closer than this are treated as the same stored value.
const SAME_CREDENCE: f64 = 1e-12;

impl KnowledgeBase {
    /// Stores `e`, replacing any entry for the same body. An entry for the
    /// complementary formula is rewritten to `1 - e.credence`.
    pub fn integrate_credal(&mut self, e: CredalEntry) -> Result<(), SymbolicError> {
        if let Some(forced) = self.forced_credence(&e.body) {
            if e.credence != forced {
                return Err(SymbolicError::Inconsistency(format!(
                    "credal entry {e} contradicts a stored fact"
                )));
            }
        }
        let comp = e.body.complement();
        if let Some(old) = self.credals.get(&comp).copied() {
            let r = 1.0 - e.credence;
            if (old - r).abs() > SAME_CREDENCE {
                self.credals.insert(comp, r);
            }
        }
        self.note_constants(&e.body);
        self.credals.insert(e.body, e.credence);
        Ok(())
    }

    /// Credence in `f` read off the store: its own entry, or the complement
    /// of its negation's entry.
    pub fn stored_credence(&self, f: &Formula) -> Option<f64> {
        self.credals
            .get(f)
            .copied()
            .or_else(|| self.credals.get(&f.complement()).map(|r| 1.0 - r))
    }

    /// Decides `~f` from the credence held for `f` and integrates the result.
    pub fn decide_negation(&mut self, f: &Formula) -> Result<CredalEntry, SymbolicError> {
        let r = match self.credals.get(f) {
            Some(r) => *r,
            None => match self.evaluate_compound(f)? {
                Some(r) => r,
                None => return Err(SymbolicError::NoCredalEntry(f.clone())),
            },
        };
        let entry = CredalEntry::new(f.complement(), 1.0 - r)?;
        self.integrate_credal(entry.clone())?;
        Ok(entry)
    }

    /// Exact probability of `f` by world enumeration, without touching the
    /// store. `None` when some atom lacks a marginal or the atoms are not
    /// declared mutually independent.
    pub fn evaluate_compound(&self, f: &Formula) -> Result<Option<f64>, SymbolicError> {
        if !f.is_ground() {
            return Err(SymbolicError::NotGround(f.to_string()));
        }
        let atoms: Vec<Atom> = f.atoms().into_iter().collect();
        if atoms.len() > MAX_ENUMERATION_ATOMS {
            return Err(SymbolicError::TooManyAtoms { n: atoms.len() });
        }
        let mut marginals = Vec::with_capacity(atoms.len());
        for a in &atoms {
            match self.stored_credence(&Formula::Atom(a.clone())) {
                Some(r) => marginals.push(r),
                None => return Ok(None),
            }
        }
        if atoms.len() > 1 && !self.declared_independent(&atoms) {
            return Ok(None);
        }
        Ok(Some(world_sum(f, &atoms, &marginals)))
    }

    /// Like [`evaluate_compound`](Self::evaluate_compound), but integrates a
    /// determined result into the store.
    pub fn decide_compound(&mut self, f: &Formula) -> Result<Option<CredalEntry>, SymbolicError> {
        match self.evaluate_compound(f)? {
            Some(r) => {
                let entry = CredalEntry::new(f.clone(), r)?;
                self.integrate_credal(entry.clone())?;
                Ok(Some(entry))
            }
            None => Ok(None),
        }
    }

    fn declared_independent(&self, atoms: &[Atom]) -> bool {
        let wanted: BTreeSet<&Atom> = atoms.iter().collect();
        self.independents
            .iter()
            .any(|set| wanted.iter().all(|a| set.contains(*a)))
    }

    /// True when stored comparatives place `f` strictly above something and
    /// strictly below something else.
    pub fn comparative_uncertain(&self, f: &Formula) -> bool {
        let greater = |c: &&super::ComparativeEntry| c.relation == Relation::Greater;
        let above_some = self
            .comparatives
            .iter()
            .filter(greater)
            .any(|c| &c.left == f);
        let below_some = self
            .comparatives
            .iter()
            .filter(greater)
            .any(|c| &c.right == f);
        above_some && below_some
    }
}

fn world_sum(f: &Formula, atoms: &[Atom], marginals: &[f64]) -> f64 {
    let n = atoms.len();
    let mut total = 0.0;
    for world in 0u32..(1u32 << n) {
        let truth = |a: &Atom| {
            let i = atoms.binary_search(a).expect("atom collected from formula");
            world & (1 << i) != 0
        };
        if !f.eval(&truth) {
            continue;
        }
        let weight: f64 = marginals
            .iter()
            .enumerate()
            .map(|(i, m)| if world & (1 << i) != 0 { *m } else { 1.0 - m })
            .product();
        total += weight;
    }
    // Rounding can carry a tautology to 1 + 2^-52.
    total.clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{parse_formula, parse_literal};
    use crate::symbolic::ComparativeEntry;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn kb_with(entries: &[(&str, f64)]) -> KnowledgeBase {
        let mut kb = KnowledgeBase::new();
        for (s, r) in entries {
            kb.integrate_credal(CredalEntry::new(f(s), *r).unwrap())
                .unwrap();
        }
        kb
    }

    fn pq_kb() -> KnowledgeBase {
        let mut kb = kb_with(&[("p", 0.9), ("q", 0.8)]);
        kb.declare_independent([f("p"), f("q")]).unwrap();
        kb
    }

    #[test]
    fn integrate_into_empty() {
        let kb = kb_with(&[("flu(a)", 0.9)]);
        assert_eq!(kb.credence(&f("flu(a)")), Some(0.9));
        assert_eq!(kb.credals().count(), 1);
    }

    #[test]
    fn integrate_is_idempotent() {
        let kb = kb_with(&[("p", 1.0), ("p", 1.0)]);
        assert_eq!(kb.credals().collect::<Vec<_>>(), vec![(&f("p"), 1.0)]);
    }

    #[test]
    fn integrate_rewrites_complement() {
        let kb = kb_with(&[("~p", 0.3), ("p", 0.9)]);
        assert_eq!(kb.credence(&f("p")), Some(0.9));
        // 1 - 0.9 by hand
        assert!((kb.credence(&f("~p")).unwrap() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn integrate_against_fact() {
        let mut kb = KnowledgeBase::new();
        kb.add_fact(parse_literal("flu(a)").unwrap()).unwrap();
        let bad = kb.integrate_credal(CredalEntry::new(f("flu(a)"), 0.9).unwrap());
        assert!(matches!(bad, Err(SymbolicError::Inconsistency(_))));
        let bad = kb.integrate_credal(CredalEntry::new(f("~flu(a)"), 0.2).unwrap());
        assert!(matches!(bad, Err(SymbolicError::Inconsistency(_))));
        assert!(kb
            .integrate_credal(CredalEntry::new(f("flu(a)"), 1.0).unwrap())
            .is_ok());
        assert!(kb
            .integrate_credal(CredalEntry::new(f("~flu(a)"), 0.0).unwrap())
            .is_ok());
    }

    #[test]
    fn negation_examples() {
        for (r, want) in [(0.9, 0.1), (1.0, 0.0), (0.5, 0.5)] {
            let mut kb = kb_with(&[("p", r)]);
            let e = kb.decide_negation(&f("p")).unwrap();
            assert_eq!(e.body, f("~p"));
            assert!((e.credence - want).abs() < 1e-12, "r = {r}");
            assert_eq!(kb.credence(&f("~p")), Some(e.credence));
            // the original entry is untouched
            assert_eq!(kb.credence(&f("p")), Some(r));
        }
    }

    #[test]
    fn negation_without_entry() {
        let mut kb = KnowledgeBase::new();
        assert_eq!(
            kb.decide_negation(&f("p")),
            Err(SymbolicError::NoCredalEntry(f("p")))
        );
    }

    #[test]
    fn negation_of_decidable_compound() {
        let mut kb = pq_kb();
        let e = kb.decide_negation(&f("p & q")).unwrap();
        assert_eq!(e.body, f("~(p & q)"));
        assert!((e.credence - 0.28).abs() < 1e-12);
    }

    #[test]
    fn conjunction_of_independent_marginals() {
        let mut kb = pq_kb();
        let e = kb.decide_compound(&f("p & q")).unwrap().unwrap();
        assert!((e.credence - 0.72).abs() < 1e-12);
        assert_eq!(kb.credence(&f("p & q")), Some(e.credence));
    }

    #[test]
    fn tautology_is_certain() {
        for r in [0.0, 0.3, 0.9] {
            let mut kb = kb_with(&[("p", r)]);
            let e = kb.decide_compound(&f("p | ~p")).unwrap().unwrap();
            assert!((e.credence - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn disjunction_by_inclusion_exclusion() {
        let mut kb = pq_kb();
        let e = kb.decide_compound(&f("p | q")).unwrap().unwrap();
        // 0.9 + 0.8 - 0.72
        assert!((e.credence - 0.98).abs() < 1e-12);
    }

    #[test]
    fn undetermined_without_independence() {
        let mut kb = kb_with(&[("p", 0.9), ("q", 0.8)]);
        assert_eq!(kb.decide_compound(&f("p & q")).unwrap(), None);
        assert_eq!(kb.credence(&f("p & q")), None);
    }

    #[test]
    fn undetermined_without_marginal() {
        let mut kb = kb_with(&[("p", 0.9)]);
        kb.declare_independent([f("p"), f("q")]).unwrap();
        assert_eq!(kb.decide_compound(&f("p & q")).unwrap(), None);
    }

    #[test]
    fn enumeration_cap() {
        let names: Vec<String> = (0..21).map(|i| format!("a{i}")).collect();
        let mut kb = KnowledgeBase::new();
        for n in &names {
            kb.integrate_credal(CredalEntry::new(f(n), 0.5).unwrap())
                .unwrap();
        }
        kb.declare_independent(names.iter().map(|n| f(n))).unwrap();
        let big = f(&names.join(" & "));
        assert_eq!(
            kb.decide_compound(&big),
            Err(SymbolicError::TooManyAtoms { n: 21 })
        );
    }

    #[test]
    fn comparative_needs_both_witnesses() {
        let mut kb = KnowledgeBase::new();
        assert!(!kb.comparative_uncertain(&f("p")));
        kb.add_comparative(ComparativeEntry::new(f("p"), Relation::Greater, f("q")).unwrap());
        assert!(!kb.comparative_uncertain(&f("p")));
        kb.add_comparative(ComparativeEntry::new(f("r"), Relation::Greater, f("p")).unwrap());
        assert!(kb.comparative_uncertain(&f("p")));
        assert!(!kb.comparative_uncertain(&f("q")));
    }

    #[test]
    fn equal_comparatives_do_not_count() {
        let mut kb = KnowledgeBase::new();
        kb.add_comparative(ComparativeEntry::new(f("p"), Relation::Equal, f("q")).unwrap());
        kb.add_comparative(ComparativeEntry::new(f("q"), Relation::Equal, f("p")).unwrap());
        assert!(!kb.comparative_uncertain(&f("p")));
    }
}
