//! Error relation matrices and the cost-bounded erroneous-sequence relation.
//!
//! A matrix assigns a cost to every pair over `alphabet ∪ {ε}`: `(σ, σ')` is a
//! replacement, `(σ, ε)` a deletion and `(ε, σ)` an insertion. Missing pairs
//! are inadmissible. Insertions and deletions must cost at least one, which
//! keeps the erroneous set of every word finite.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::plant::{EventId, Plant};

/// An event or the empty symbol (`None`).
pub type Symbol = Option<EventId>;

/// Unvalidated matrix contents. Omitted pairs are inadmissible and omitted
/// diagonal cells default to zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawErm {
    pub alphabet: Vec<EventId>,
    pub bound: u32,
    pub entries: Vec<(Symbol, Symbol, u32)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErmViolation {
    NonZeroDiagonal(u32),
    ZeroCostInsertion,
    ZeroCostDeletion,
    OutsideAlphabet,
    DuplicateEntry,
    DuplicateSymbol,
}

/// A rejected cell, with the reason.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ErmDiagnostic {
    pub from: Symbol,
    pub to: Symbol,
    pub violation: ErmViolation,
}

impl ErmDiagnostic {
    pub fn describe(&self, name: impl Fn(EventId) -> String) -> String {
        let sym = |s: Symbol| s.map(&name).unwrap_or_else(|| "eps".to_owned());
        let cell = format!("[{}, {}]", sym(self.from), sym(self.to));
        match self.violation {
            ErmViolation::NonZeroDiagonal(c) => {
                format!("{cell}: error-less action must cost 0, found {c}")
            }
            ErmViolation::ZeroCostInsertion => format!(
                "{cell}: insertion cost must be at least 1 (zero-cost insertions make the erroneous set infinite)"
            ),
            ErmViolation::ZeroCostDeletion => format!(
                "{cell}: deletion cost must be at least 1 (zero-cost deletions make the witness search unbounded)"
            ),
            ErmViolation::OutsideAlphabet => format!("{cell}: symbol outside the matrix alphabet"),
            ErmViolation::DuplicateEntry => format!("{cell}: cell given more than once"),
            ErmViolation::DuplicateSymbol => format!("{cell}: alphabet lists the event twice"),
        }
    }
}

impl fmt::Display for ErmDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe(|e| format!("#{}", e.0)))
    }
}

/// A validated error relation matrix with cost bound `c_u`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Erm {
    alphabet: Vec<EventId>,
    bound: u32,
    positions: BTreeMap<EventId, usize>,
    // (|alphabet|+1)^2 cells, index 0 is ε
    table: Vec<Option<u32>>,
}

/// Checks every well-formedness rule and returns all violations at once.
pub fn validate_erm(raw: &RawErm) -> std::result::Result<Erm, Vec<ErmDiagnostic>> {
    let mut diags = Vec::new();
    let mut alphabet = raw.alphabet.clone();
    alphabet.sort();
    for pair in alphabet.windows(2) {
        if pair[0] == pair[1] {
            diags.push(ErmDiagnostic {
                from: Some(pair[0]),
                to: Some(pair[0]),
                violation: ErmViolation::DuplicateSymbol,
            });
        }
    }
    alphabet.dedup();
    let positions: BTreeMap<EventId, usize> =
        alphabet.iter().enumerate().map(|(i, &e)| (e, i + 1)).collect();
    let width = alphabet.len() + 1;
    let mut table = vec![None; width * width];
    for i in 0..width {
        table[i * width + i] = Some(0);
    }
    let mut seen = BTreeSet::new();
    for &(from, to, cost) in &raw.entries {
        let pos = |s: Symbol| match s {
            None => Some(0),
            Some(e) => positions.get(&e).copied(),
        };
        let (Some(r), Some(c)) = (pos(from), pos(to)) else {
            diags.push(ErmDiagnostic {
                from,
                to,
                violation: ErmViolation::OutsideAlphabet,
            });
            continue;
        };
        if !seen.insert((r, c)) {
            diags.push(ErmDiagnostic {
                from,
                to,
                violation: ErmViolation::DuplicateEntry,
            });
            continue;
        }
        let violation = if r == c && cost != 0 {
            Some(ErmViolation::NonZeroDiagonal(cost))
        } else if r == 0 && c != 0 && cost == 0 {
            Some(ErmViolation::ZeroCostInsertion)
        } else if c == 0 && r != 0 && cost == 0 {
            Some(ErmViolation::ZeroCostDeletion)
        } else {
            None
        };
        if let Some(violation) = violation {
            diags.push(ErmDiagnostic {
                from,
                to,
                violation,
            });
            continue;
        }
        table[r * width + c] = Some(cost);
    }
    if diags.is_empty() {
        Ok(Erm {
            alphabet,
            bound: raw.bound,
            positions,
            table,
        })
    } else {
        Err(diags)
    }
}

impl Erm {
    /// The matrix admitting only error-less actions.
    pub fn identity(alphabet: Vec<EventId>, bound: u32) -> Self {
        validate_erm(&RawErm {
            alphabet,
            bound,
            entries: Vec::new(),
        })
        .expect("identity matrix is well formed")
    }

    /// Validates `raw`, folding diagnostics into an [`Error`].
    pub fn from_raw(raw: &RawErm, name: impl Fn(EventId) -> String) -> Result<Self> {
        validate_erm(raw)
            .map_err(|d| Error::InvalidErm(d.iter().map(|d| d.describe(&name)).collect()))
    }

    pub fn alphabet(&self) -> &[EventId] {
        &self.alphabet
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn contains(&self, event: EventId) -> bool {
        self.positions.contains_key(&event)
    }

    /// Cost of turning `from` into `to`; `None` when inadmissible.
    pub fn cost(&self, from: Symbol, to: Symbol) -> Option<u32> {
        let pos = |s: Symbol| match s {
            None => Some(0),
            Some(e) => self.positions.get(&e).copied(),
        };
        let (r, c) = (pos(from)?, pos(to)?);
        self.table[r * (self.alphabet.len() + 1) + c]
    }

    /// `cost(from, to)` when admissible and `base + cost` stays within the bound.
    pub fn step(&self, base: u32, from: Symbol, to: Symbol) -> Option<u32> {
        let c = base.checked_add(self.cost(from, to)?)?;
        (c <= self.bound).then_some(c)
    }

    /// All admissible off-diagonal cells as `(from, to, cost)`.
    pub fn error_actions(&self) -> Vec<(Symbol, Symbol, u32)> {
        let syms: Vec<Symbol> = std::iter::once(None)
            .chain(self.alphabet.iter().map(|&e| Some(e)))
            .collect();
        let mut out = Vec::new();
        for &from in &syms {
            for &to in &syms {
                if from != to {
                    if let Some(c) = self.cost(from, to) {
                        out.push((from, to, c));
                    }
                }
            }
        }
        out
    }

    pub fn to_raw(&self) -> RawErm {
        RawErm {
            alphabet: self.alphabet.clone(),
            bound: self.bound,
            entries: self.error_actions(),
        }
    }

    pub fn with_bound(&self, bound: u32) -> Self {
        Erm {
            bound,
            ..self.clone()
        }
    }

    /// The sub-matrix over `alphabet ∩ self.alphabet`.
    pub fn restrict(&self, alphabet: &[EventId]) -> Self {
        let keep: BTreeSet<EventId> = alphabet.iter().copied().filter(|&e| self.contains(e)).collect();
        let entries = self
            .error_actions()
            .into_iter()
            .filter(|(f, t, _)| {
                f.is_none_or(|e| keep.contains(&e)) && t.is_none_or(|e| keep.contains(&e))
            })
            .collect();
        validate_erm(&RawErm {
            alphabet: keep.into_iter().collect(),
            bound: self.bound,
            entries,
        })
        .expect("restriction of a valid matrix is valid")
    }

    /// Requires the alphabet to be exactly the plant's observable events.
    pub fn check_global(&self, plant: &Plant) -> Result<()> {
        if self.alphabet != plant.observable_events() {
            return Err(Error::invalid(
                "matrix alphabet differs from the plant's observable events",
            ));
        }
        Ok(())
    }

    fn check_word(&self, w: &[EventId]) -> Result<()> {
        match w.iter().find(|e| !self.contains(**e)) {
            Some(e) => Err(Error::invalid(format!(
                "event #{} is outside the matrix alphabet",
                e.0
            ))),
            None => Ok(()),
        }
    }
}

/// One matrix per site sharing a single cumulative cost bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalErmSet {
    per_site: Vec<Erm>,
    bound: u32,
}

impl LocalErmSet {
    /// Each member must cover exactly its site's alphabet; member bounds are
    /// overridden by the shared `bound`.
    pub fn new(plant: &Plant, per_site: Vec<Erm>, bound: u32) -> Result<Self> {
        if per_site.len() != plant.num_sites() {
            return Err(Error::invalid(format!(
                "{} local matrices for {} sites",
                per_site.len(),
                plant.num_sites()
            )));
        }
        for (site, erm) in per_site.iter().enumerate() {
            if erm.alphabet() != plant.site_alphabet(site).as_slice() {
                return Err(Error::invalid(format!(
                    "matrix of site {} does not match the site alphabet",
                    site + 1
                )));
            }
        }
        let per_site = per_site.into_iter().map(|e| e.with_bound(bound)).collect();
        Ok(LocalErmSet { per_site, bound })
    }

    pub fn identity(plant: &Plant, bound: u32) -> Self {
        let per_site = (0..plant.num_sites())
            .map(|s| Erm::identity(plant.site_alphabet(s), bound))
            .collect();
        LocalErmSet { per_site, bound }
    }

    pub fn site(&self, site: usize) -> &Erm {
        &self.per_site[site]
    }

    pub fn sites(&self) -> &[Erm] {
        &self.per_site
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn num_sites(&self) -> usize {
        self.per_site.len()
    }
}

/// A sequence paired with the total cost of the edit script producing it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CostedSequence {
    pub seq: Vec<EventId>,
    pub cost: u32,
}

impl CostedSequence {
    pub fn new(seq: Vec<EventId>, cost: u32) -> Self {
        CostedSequence { seq, cost }
    }
}

/// Default cap on the size of an enumerated erroneous set.
pub const DEFAULT_ERRONEOUS_CAP: usize = 100_000;

/// Every `(ω_r, c)` obtainable from `w` by per-symbol replacement or
/// deletion plus insertions at any position, with `c ≤ c_u`.
pub fn erroneous_set(w: &[EventId], erm: &Erm, cap: usize) -> Result<BTreeSet<CostedSequence>> {
    erm.check_word(w)?;
    let mut out = BTreeSet::new();
    let mut buf = Vec::new();
    expand(w, 0, erm, 0, &mut buf, &mut out, cap)?;
    Ok(out)
}

fn expand(
    w: &[EventId],
    pos: usize,
    erm: &Erm,
    cost: u32,
    buf: &mut Vec<EventId>,
    out: &mut BTreeSet<CostedSequence>,
    cap: usize,
) -> Result<()> {
    // insertion at the current gap
    for &sym in erm.alphabet() {
        if let Some(c) = erm.step(cost, None, Some(sym)) {
            buf.push(sym);
            expand(w, pos, erm, c, buf, out, cap)?;
            buf.pop();
        }
    }
    let Some(&orig) = w.get(pos) else {
        out.insert(CostedSequence::new(buf.clone(), cost));
        if out.len() > cap {
            return Err(Error::resource(format!(
                "erroneous set exceeds {cap} members"
            )));
        }
        return Ok(());
    };
    if let Some(c) = erm.step(cost, Some(orig), None) {
        expand(w, pos + 1, erm, c, buf, out, cap)?;
    }
    for &sym in erm.alphabet() {
        if let Some(c) = erm.step(cost, Some(orig), Some(sym)) {
            buf.push(sym);
            expand(w, pos + 1, erm, c, buf, out, cap)?;
            buf.pop();
        }
    }
    Ok(())
}

/// Bit set over `0..=bound`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostSet {
    words: Vec<u64>,
    bound: u32,
}

impl CostSet {
    pub fn empty(bound: u32) -> Self {
        CostSet {
            words: vec![0; bound as usize / 64 + 1],
            bound,
        }
    }

    pub fn insert(&mut self, c: u32) {
        if c <= self.bound {
            self.words[c as usize / 64] |= 1 << (c % 64);
        }
    }

    pub fn contains(&self, c: u32) -> bool {
        c <= self.bound && self.words[c as usize / 64] & (1 << (c % 64)) != 0
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Adds `{c + shift | c ∈ other}` truncated at the bound.
    pub fn union_shifted(&mut self, other: &CostSet, shift: u32) {
        for c in other.iter() {
            match c.checked_add(shift) {
                Some(s) if s <= self.bound => self.insert(s),
                _ => break,
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        (0..=self.bound).filter(move |&c| self.contains(c))
    }
}

/// Every `c ≤ c_u` such that `(wr, c)` is in the erroneous set of `w`,
/// computed over alignment prefixes.
pub fn tamper_costs(w: &[EventId], wr: &[EventId], erm: &Erm) -> BTreeSet<u32> {
    tamper_cost_set(w, wr, erm).iter().collect()
}

pub fn tamper_cost_set(w: &[EventId], wr: &[EventId], erm: &Erm) -> CostSet {
    let mut alignment = Alignment::new(erm, wr);
    for &sym in w {
        alignment = alignment.push(sym);
    }
    alignment.final_costs().clone()
}

/// One row of the alignment table: achievable costs of turning a consumed
/// prefix of the original into each prefix of `target`.
#[derive(Debug, Clone)]
pub struct Alignment<'a> {
    erm: &'a Erm,
    target: &'a [EventId],
    row: Vec<CostSet>,
}

impl<'a> Alignment<'a> {
    /// The row for an empty original: insertions only.
    pub fn new(erm: &'a Erm, target: &'a [EventId]) -> Self {
        let mut row = vec![CostSet::empty(erm.bound()); target.len() + 1];
        row[0].insert(0);
        for j in 1..=target.len() {
            if let Some(k) = erm.cost(None, Some(target[j - 1])) {
                let prev = row[j - 1].clone();
                row[j].union_shifted(&prev, k);
            }
        }
        Alignment { erm, target, row }
    }

    /// The row after consuming one more original symbol.
    pub fn push(&self, sym: EventId) -> Self {
        let erm = self.erm;
        let deletion = erm.cost(Some(sym), None);
        let mut row: Vec<CostSet> = Vec::with_capacity(self.row.len());
        for j in 0..self.row.len() {
            let mut cell = CostSet::empty(erm.bound());
            if let Some(k) = deletion {
                cell.union_shifted(&self.row[j], k);
            }
            if j > 0 {
                let t = self.target[j - 1];
                if let Some(k) = erm.cost(Some(sym), Some(t)) {
                    cell.union_shifted(&self.row[j - 1], k);
                }
                if let Some(k) = erm.cost(None, Some(t)) {
                    cell.union_shifted(&row[j - 1], k);
                }
            }
            row.push(cell);
        }
        Alignment {
            erm,
            target: self.target,
            row,
        }
    }

    /// Costs of turning the consumed prefix into the whole target.
    pub fn final_costs(&self) -> &CostSet {
        self.row.last().expect("non-empty row")
    }

    /// No extension of the consumed prefix can still reach the target.
    pub fn is_dead(&self) -> bool {
        self.row.iter().all(CostSet::is_empty)
    }

    /// Cheapest cost over every prefix of the target.
    pub fn min_cost(&self) -> Option<u32> {
        self.row.iter().filter_map(|c| c.iter().next()).min()
    }
}
