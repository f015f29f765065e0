//! Propositional core: variables, literals, clauses, CNF formulas and
//! substitutions.
//!
//! Clauses are stored as sorted, duplicate-free literal vectors and are never
//! tautological. A restriction that would produce a tautology yields
//! [`Restricted::True`] instead of a clause.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::ops::Not;

use thiserror::Error;

/// A propositional variable, identified by a 1-based id.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variable(u32);

impl Variable {
    /// Panics if `id == 0`.
    pub fn new(id: u32) -> Variable {
        assert!(id >= 1, "variable ids are 1-based");
        Variable(id)
    }

    pub fn try_new(id: u32) -> Option<Variable> {
        (id >= 1).then_some(Variable(id))
    }

    pub fn id(self) -> u32 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    pub fn positive(self) -> Literal {
        Literal::new(self, true)
    }

    pub fn negative(self) -> Literal {
        Literal::new(self, false)
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// A variable or its negation.
///
/// Literals order by variable id first, then negative before positive, which
/// is the canonical order used inside clauses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    var: Variable,
    positive: bool,
}

impl Literal {
    pub fn new(var: Variable, positive: bool) -> Literal {
        Literal { var, positive }
    }

    /// Builds a literal from its DIMACS encoding. Returns `None` for 0.
    pub fn from_dimacs(code: i64) -> Option<Literal> {
        let id = u32::try_from(code.unsigned_abs()).ok()?;
        Variable::try_new(id).map(|v| Literal::new(v, code > 0))
    }

    pub fn to_dimacs(self) -> i64 {
        let id = i64::from(self.var.id());
        if self.positive {
            id
        } else {
            -id
        }
    }

    pub fn var(self) -> Variable {
        self.var
    }

    pub fn is_positive(self) -> bool {
        self.positive
    }
}

impl Not for Literal {
    type Output = Literal;

    fn not(self) -> Literal {
        Literal {
            var: self.var,
            positive: !self.positive,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("clause contains both {0} and its negation")]
pub struct Tautology(pub Literal);

/// A non-tautological set of literals. The empty clause is ⊥.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Clause {
    lits: Vec<Literal>,
}

impl Clause {
    pub fn empty() -> Clause {
        Clause { lits: Vec::new() }
    }

    /// Sorts and deduplicates `lits`; fails if a complementary pair remains.
    pub fn new(lits: impl IntoIterator<Item = Literal>) -> Result<Clause, Tautology> {
        let mut lits: Vec<Literal> = lits.into_iter().collect();
        lits.sort_unstable();
        lits.dedup();
        for pair in lits.windows(2) {
            if pair[0].var() == pair[1].var() {
                return Err(Tautology(pair[1]));
            }
        }
        Ok(Clause { lits })
    }

    /// Convenience constructor from DIMACS codes, for tests and examples.
    ///
    /// Panics on a zero code or a tautology.
    pub fn from_dimacs(codes: &[i64]) -> Clause {
        Clause::new(
            codes
                .iter()
                .map(|&c| Literal::from_dimacs(c).expect("literal code must be nonzero")),
        )
        .expect("clause must not be tautological")
    }

    pub fn literals(&self) -> &[Literal] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn contains(&self, lit: Literal) -> bool {
        self.lits.binary_search(&lit).is_ok()
    }

    /// The literal of `var` in this clause, if any.
    pub fn literal_of(&self, var: Variable) -> Option<Literal> {
        let pos = self.lits.partition_point(|l| l.var() < var);
        self.lits.get(pos).copied().filter(|l| l.var() == var)
    }

    pub fn max_var(&self) -> Option<Variable> {
        self.lits.last().map(|l| l.var())
    }

    pub fn vars(&self) -> impl Iterator<Item = Variable> + '_ {
        self.lits.iter().map(|l| l.var())
    }

    /// Variables occurring positively in `self` and negatively in `other`, or
    /// vice versa.
    pub fn clashing_vars(&self, other: &Clause) -> Vec<Variable> {
        self.lits
            .iter()
            .filter(|&&l| other.contains(!l))
            .map(|l| l.var())
            .collect()
    }

    /// Resolves `self` (holding `pivot` positively) with `other` (holding it
    /// negatively). Returns `None` when the premises do not fit or the
    /// resolvent would be tautological.
    pub fn resolve(&self, other: &Clause, pivot: Variable) -> Option<Clause> {
        if !self.contains(pivot.positive()) || !other.contains(pivot.negative()) {
            return None;
        }
        let lits = self
            .lits
            .iter()
            .chain(other.lits.iter())
            .copied()
            .filter(|l| l.var() != pivot);
        Clause::new(lits).ok()
    }

    pub fn to_dimacs_line(&self) -> String {
        let mut s = String::new();
        for l in &self.lits {
            s.push_str(&l.to_dimacs().to_string());
            s.push(' ');
        }
        s.push('0');
        s
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lits.is_empty() {
            return write!(f, "⊥");
        }
        write!(f, "{{")?;
        for (i, l) in self.lits.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "}}")
    }
}

/// A CNF formula: declared variable count and an ordered clause list.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CnfFormula {
    num_vars: u32,
    clauses: Vec<Clause>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("clause {clause_index} uses variable {var} but only {num_vars} are declared")]
pub struct VariableOutOfRange {
    pub clause_index: usize,
    pub var: u32,
    pub num_vars: u32,
}

impl CnfFormula {
    pub fn new(num_vars: u32, clauses: Vec<Clause>) -> Result<CnfFormula, VariableOutOfRange> {
        for (i, c) in clauses.iter().enumerate() {
            if let Some(v) = c.max_var() {
                if v.id() > num_vars {
                    return Err(VariableOutOfRange {
                        clause_index: i,
                        var: v.id(),
                        num_vars,
                    });
                }
            }
        }
        Ok(CnfFormula { num_vars, clauses })
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn contains(&self, clause: &Clause) -> bool {
        self.clauses.iter().any(|c| c == clause)
    }

    /// Clause set for repeated membership queries.
    pub fn clause_set(&self) -> HashSet<&Clause> {
        self.clauses.iter().collect()
    }

    /// Symbol count: 4 header tokens plus one per literal and one
    /// terminator per clause.
    pub fn symbol_size(&self) -> u64 {
        4 + self
            .clauses
            .iter()
            .map(|c| c.len() as u64 + 1)
            .sum::<u64>()
    }

    /// Same clauses as a multiset, ignoring order.
    pub fn same_clauses(&self, other: &CnfFormula) -> bool {
        let mut a = self.clauses.clone();
        let mut b = other.clauses.clone();
        a.sort();
        b.sort();
        a == b
    }

    pub fn evaluate(&self, model: &Assignment) -> bool {
        self.clauses.iter().all(|c| model.satisfies(c))
    }
}

/// A total truth assignment, indexed by variable id − 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment(pub Vec<bool>);

impl Assignment {
    pub fn value(&self, lit: Literal) -> bool {
        let v = self.0.get(lit.var().index()).copied().unwrap_or(false);
        v == lit.is_positive()
    }

    pub fn satisfies(&self, clause: &Clause) -> bool {
        clause.literals().iter().any(|&l| self.value(l))
    }
}

/// Image of a variable under a substitution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SubstValue {
    Lit(Literal),
    True,
    False,
}

impl SubstValue {
    fn negate(self) -> SubstValue {
        match self {
            SubstValue::Lit(l) => SubstValue::Lit(!l),
            SubstValue::True => SubstValue::False,
            SubstValue::False => SubstValue::True,
        }
    }
}

/// A partial map from variables to literals or constants. Unmapped variables
/// map to themselves.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution {
    map: BTreeMap<Variable, SubstValue>,
}

/// Result of restricting a clause: `True` when its image is tautological.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Restricted {
    True,
    Clause(Clause),
}

impl Substitution {
    pub fn new() -> Substitution {
        Substitution::default()
    }

    pub fn insert(&mut self, var: Variable, value: SubstValue) -> Option<SubstValue> {
        self.map.insert(var, value)
    }

    pub fn get(&self, var: Variable) -> Option<SubstValue> {
        self.map.get(&var).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Variable, SubstValue)> + '_ {
        self.map.iter().map(|(&k, &v)| (k, v))
    }

    /// σ(x), with σ(¬x) = ¬σ(x).
    pub fn apply_var(&self, var: Variable) -> SubstValue {
        self.get(var).unwrap_or(SubstValue::Lit(var.positive()))
    }

    pub fn apply_lit(&self, lit: Literal) -> SubstValue {
        let v = self.apply_var(lit.var());
        if lit.is_positive() {
            v
        } else {
            v.negate()
        }
    }

    /// C|σ: `True` if σ(C) contains True or a complementary pair, otherwise
    /// σ(C) with False removed.
    pub fn restrict_clause(&self, clause: &Clause) -> Restricted {
        let mut out = Vec::with_capacity(clause.len());
        for &l in clause.literals() {
            match self.apply_lit(l) {
                SubstValue::True => return Restricted::True,
                SubstValue::False => {}
                SubstValue::Lit(m) => out.push(m),
            }
        }
        match Clause::new(out) {
            Ok(c) => Restricted::Clause(c),
            Err(_) => Restricted::True,
        }
    }

    /// Largest variable id in the domain or range.
    pub fn max_var(&self) -> u32 {
        self.map
            .iter()
            .map(|(k, v)| match v {
                SubstValue::Lit(l) => k.id().max(l.var().id()),
                _ => k.id(),
            })
            .max()
            .unwrap_or(0)
    }
}

impl FromIterator<(Variable, SubstValue)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Variable, SubstValue)>>(iter: I) -> Self {
        Substitution {
            map: iter.into_iter().collect(),
        }
    }
}

/// Γ|σ, keeping the original variable count (raised only if σ renames into
/// a higher id that survives).
pub fn apply_substitution(formula: &CnfFormula, sigma: &Substitution) -> CnfFormula {
    let restricted = apply_substitution_with_vars(formula, sigma, u32::MAX)
        .expect("every id fits below u32::MAX");
    let used = restricted
        .clauses()
        .iter()
        .filter_map(|c| c.max_var())
        .map(|v| v.id())
        .max()
        .unwrap_or(0);
    CnfFormula {
        num_vars: formula.num_vars().max(used),
        clauses: restricted.clauses,
    }
}

/// Γ|σ with a caller-supplied variable count.
pub fn apply_substitution_with_vars(
    formula: &CnfFormula,
    sigma: &Substitution,
    num_vars: u32,
) -> Result<CnfFormula, VariableOutOfRange> {
    let clauses = formula
        .clauses()
        .iter()
        .filter_map(|c| match sigma.restrict_clause(c) {
            Restricted::True => None,
            Restricted::Clause(d) => Some(d),
        })
        .collect();
    CnfFormula::new(num_vars, clauses)
}

/// Default variable cap for [`brute_sat`].
pub const DEFAULT_BRUTE_CAP: u32 = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SatResult {
    Sat(Assignment),
    Unsat,
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatResult::Sat(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("formula has {num_vars} variables, above the exhaustive-search cap of {cap}")]
pub struct CapExceeded {
    pub num_vars: u32,
    pub cap: u32,
}

/// Exhaustive truth-table satisfiability check.
pub fn brute_sat(formula: &CnfFormula, cap: u32) -> Result<SatResult, CapExceeded> {
    let n = formula.num_vars();
    if n > cap || n > 30 {
        return Err(CapExceeded { num_vars: n, cap });
    }
    // Each clause as (positive mask, negative mask); satisfied when the
    // assignment word hits either.
    let masks: Vec<(u32, u32)> = formula
        .clauses()
        .iter()
        .map(|c| {
            c.literals().iter().fold((0u32, 0u32), |(p, q), l| {
                let bit = 1u32 << l.var().index();
                if l.is_positive() {
                    (p | bit, q)
                } else {
                    (p, q | bit)
                }
            })
        })
        .collect();
    for word in 0u32..(1u32 << n) {
        if masks.iter().all(|&(p, q)| word & p != 0 || !word & q != 0) {
            let model = (0..n).map(|i| word & (1 << i) != 0).collect();
            return Ok(SatResult::Sat(Assignment(model)));
        }
    }
    Ok(SatResult::Unsat)
}

/// Complete backtracking search with unit propagation, for formulas too wide
/// for the truth table.
pub fn search_sat(formula: &CnfFormula) -> SatResult {
    let n = formula.num_vars() as usize;
    let mut assign: Vec<Option<bool>> = vec![None; n];
    if dpll(formula.clauses(), &mut assign) {
        SatResult::Sat(Assignment(
            assign.into_iter().map(|v| v.unwrap_or(false)).collect(),
        ))
    } else {
        SatResult::Unsat
    }
}

fn dpll(clauses: &[Clause], assign: &mut Vec<Option<bool>>) -> bool {
    let mut trail = Vec::new();
    let ok = loop {
        let mut unit = None;
        let mut conflict = false;
        let mut branch = None;
        for c in clauses {
            let mut unassigned = None;
            let mut count = 0;
            let mut sat = false;
            for &l in c.literals() {
                match assign[l.var().index()] {
                    Some(v) if v == l.is_positive() => {
                        sat = true;
                        break;
                    }
                    Some(_) => {}
                    None => {
                        count += 1;
                        unassigned = Some(l);
                    }
                }
            }
            if sat {
                continue;
            }
            match count {
                0 => {
                    conflict = true;
                    break;
                }
                1 => {
                    unit = unassigned;
                    break;
                }
                _ => {
                    if branch.is_none() {
                        branch = unassigned;
                    }
                }
            }
        }
        if conflict {
            break false;
        }
        if let Some(l) = unit {
            assign[l.var().index()] = Some(l.is_positive());
            trail.push(l.var().index());
            continue;
        }
        match branch {
            None => return true,
            Some(l) => {
                let i = l.var().index();
                for value in [l.is_positive(), !l.is_positive()] {
                    assign[i] = Some(value);
                    if dpll(clauses, assign) {
                        return true;
                    }
                }
                assign[i] = None;
                break false;
            }
        }
    };
    for i in trail {
        assign[i] = None;
    }
    ok
}
