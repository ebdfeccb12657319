use std::collections::{HashSet, VecDeque};

use serde::Serialize;

use crate::error::GroupError;
use crate::word::{Letter, Word};

use super::normal_form::{exponents, heisenberg_coords, BsForm};
use super::presentation::{Presentation, Strategy};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Membership {
    Yes,
    No,
    Unknown,
}

/// Which oracle answers membership queries for a subgroup.
#[derive(Clone, Debug, PartialEq)]
pub enum MembershipKind {
    /// Free group, subgroup generated by a set of generators: exact.
    FreeLetters(Vec<usize>),
    /// Free group, cyclic subgroup `⟨u⟩`: exact.
    FreeCyclic(Word),
    /// Free abelian group: echelon basis of the subgroup lattice. Exact.
    AbelianLattice(Lattice),
    /// `⟨s⟩` for a generator whose powers are their own normal forms. Exact.
    SingleLetter(usize),
    /// Subgroup of one factor of a direct or free product. Exact when the
    /// inner oracle is.
    Factor { right: bool, inner: Box<SubgroupSpec> },
    /// Breadth-first enumeration over the subgroup's own generators.
    /// Answers `Yes` or `Unknown`, never `No`.
    Exhaustive,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubgroupSpec {
    generators: Vec<Word>,
    kind: MembershipKind,
}

/// Rows in echelon form with positive pivots.
#[derive(Clone, Debug, PartialEq)]
pub struct Lattice {
    rows: Vec<Vec<i64>>,
    pivots: Vec<usize>,
}

const EXHAUSTIVE_CAP: usize = 200_000;

impl SubgroupSpec {
    /// Picks the strongest oracle available for `generators` in `p`.
    pub fn new(p: &Presentation, generators: Vec<Word>) -> Result<Self, GroupError> {
        let generators = generators
            .iter()
            .map(|g| p.normal_form(g))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .filter(|g| !g.is_empty())
            .collect::<Vec<_>>();
        let kind = choose_kind(p, &generators)?;
        Ok(SubgroupSpec { generators, kind })
    }

    /// Forces the exhaustive oracle, mostly for cross-checking.
    pub fn exhaustive(p: &Presentation, generators: Vec<Word>) -> Result<Self, GroupError> {
        let mut s = SubgroupSpec::new(p, generators)?;
        s.kind = MembershipKind::Exhaustive;
        Ok(s)
    }

    pub fn generators(&self) -> &[Word] {
        &self.generators
    }

    pub fn kind(&self) -> &MembershipKind {
        &self.kind
    }

    pub fn is_exact(&self) -> bool {
        match &self.kind {
            MembershipKind::Exhaustive => false,
            MembershipKind::Factor { inner, .. } => inner.is_exact(),
            _ => true,
        }
    }

    /// Canonical representative of the left coset `wH`, when the oracle has
    /// one. Two words give equal keys exactly when their cosets coincide.
    pub fn coset_key(&self, p: &Presentation, w: &Word) -> Result<Option<Word>, GroupError> {
        let nf = p.normal_form(w)?;
        Ok(match (&self.kind, p.strategy()) {
            (MembershipKind::FreeLetters(gens), _) => {
                let mut letters = nf.0;
                while letters.last().is_some_and(|l| gens.contains(&l.generator())) {
                    letters.pop();
                }
                Some(Word(letters))
            }
            (MembershipKind::AbelianLattice(lat), Strategy::FreeAbelian(n)) => {
                let v = lat.reduce(exponents(*n, nf.letters()));
                Some(Word(super::normal_form::abelian_word(&v)))
            }
            (MembershipKind::SingleLetter(g), Strategy::Heisenberg) => {
                let (a, b, c) = heisenberg_coords(nf.letters());
                let rep = match g {
                    0 => (0, b, c + a * b),
                    1 => (a, 0, c),
                    _ => (a, b, 0),
                };
                Some(Word(super::normal_form::heisenberg_word(rep)))
            }
            (MembershipKind::SingleLetter(1), Strategy::BaumslagSolitar { p: bp, q }) => {
                let mut f = BsForm::from_letters(*bp, *q, nf.letters());
                *f.ks.last_mut().unwrap() = 0;
                Some(Word(f.to_letters()))
            }
            (MembershipKind::SingleLetter(g), _) => {
                let mut letters = nf.0;
                while letters.last().is_some_and(|l| l.generator() == *g) {
                    letters.pop();
                }
                match p.strategy() {
                    Strategy::FreeGroup | Strategy::FreeAbelian(_) => Some(Word(letters)),
                    _ => None,
                }
            }
            (MembershipKind::Factor { right, inner }, Strategy::DirectProduct(a, b)) => {
                let n1 = a.generator_count();
                let (mine, other): (Vec<Letter>, Vec<Letter>) = nf.letters().iter().partition(|l| (l.generator() >= n1) == *right);
                let (factor, local) = if *right {
                    (b, Word(mine.iter().map(|l| l.unshifted(n1)).collect()))
                } else {
                    (a, Word(mine))
                };
                inner.coset_key(factor, &local)?.map(|k| {
                    let k = if *right { k.0.iter().map(|l| l.shifted(n1)).collect() } else { k.0 };
                    let mut out = Word(other);
                    out.0.extend(k);
                    p.normal_form(&out).unwrap_or(out)
                })
            }
            (MembershipKind::Factor { right, inner }, Strategy::FreeProduct(a, b)) => {
                let n1 = a.generator_count();
                let split = nf
                    .letters()
                    .iter()
                    .rposition(|l| (l.generator() >= n1) != *right)
                    .map_or(0, |i| i + 1);
                let (head, tail) = nf.letters().split_at(split);
                let (factor, local) = if *right {
                    (b, Word(tail.iter().map(|l| l.unshifted(n1)).collect()))
                } else {
                    (a, Word(tail.to_vec()))
                };
                inner.coset_key(factor, &local)?.map(|k| {
                    let mut out = head.to_vec();
                    out.extend(k.0.iter().map(|l| if *right { l.shifted(n1) } else { *l }));
                    Word(out)
                })
            }
            _ => None,
        })
    }
}

fn choose_kind(p: &Presentation, gens: &[Word]) -> Result<MembershipKind, GroupError> {
    let single_letters: Option<Vec<usize>> = gens.iter().map(|g| (g.len() == 1).then(|| g.letters()[0].generator())).collect();
    Ok(match p.strategy() {
        Strategy::FreeGroup => match (&single_letters, gens) {
            (Some(set), _) => {
                let mut set = set.clone();
                set.sort_unstable();
                set.dedup();
                MembershipKind::FreeLetters(set)
            }
            (None, [u]) => MembershipKind::FreeCyclic(u.clone()),
            _ => MembershipKind::Exhaustive,
        },
        Strategy::FreeAbelian(n) => MembershipKind::AbelianLattice(Lattice::new(*n, gens.iter().map(|g| exponents(*n, g.letters())).collect())),
        Strategy::Heisenberg | Strategy::BaumslagSolitar { .. } => match single_letters.as_deref() {
            Some([g]) => MembershipKind::SingleLetter(*g),
            _ => MembershipKind::Exhaustive,
        },
        Strategy::DirectProduct(a, b) | Strategy::FreeProduct(a, b) => {
            let n1 = a.generator_count();
            let all = |right: bool| gens.iter().all(|g| g.letters().iter().all(|l| (l.generator() >= n1) == right));
            if gens.is_empty() {
                MembershipKind::Exhaustive
            } else if all(false) {
                MembershipKind::Factor {
                    right: false,
                    inner: Box::new(SubgroupSpec::new(a, gens.to_vec())?),
                }
            } else if all(true) {
                let local = gens.iter().map(|g| Word(g.letters().iter().map(|l| l.unshifted(n1)).collect())).collect();
                MembershipKind::Factor {
                    right: true,
                    inner: Box::new(SubgroupSpec::new(b, local)?),
                }
            } else {
                MembershipKind::Exhaustive
            }
        }
        Strategy::GenericRewriting(_) => MembershipKind::Exhaustive,
    })
}

/// Decides `w ∈ H`. Built-in oracles are exact; the exhaustive oracle
/// searches products of at most `radius` subgroup generators and reports
/// `Unknown` when it finds nothing.
pub fn subgroup_member(p: &Presentation, s: &SubgroupSpec, w: &Word, radius: usize) -> Result<Membership, GroupError> {
    let nf = p.normal_form(w)?;
    if nf.is_empty() {
        return Ok(Membership::Yes);
    }
    let yes_no = |b: bool| if b { Membership::Yes } else { Membership::No };
    Ok(match (&s.kind, p.strategy()) {
        (MembershipKind::FreeLetters(gens), _) => yes_no(nf.letters().iter().all(|l| gens.contains(&l.generator()))),
        (MembershipKind::FreeCyclic(u), _) => {
            let bound = nf.len() as i64 + 1;
            yes_no((-bound..=bound).any(|k| k != 0 && p.normal_form(&u.power(k)).is_ok_and(|x| x == nf)))
        }
        (MembershipKind::AbelianLattice(lat), Strategy::FreeAbelian(n)) => yes_no(lat.contains(exponents(*n, nf.letters()))),
        (MembershipKind::SingleLetter(g), _) => yes_no(nf.letters().windows(2).all(|x| x[0] == x[1]) && nf.letters()[0].generator() == *g),
        (MembershipKind::Factor { right, inner }, Strategy::DirectProduct(a, b) | Strategy::FreeProduct(a, b)) => {
            let n1 = a.generator_count();
            if !nf.letters().iter().all(|l| (l.generator() >= n1) == *right) {
                // Normal forms of both product types keep factors apart, so
                // a letter of the other factor rules out membership.
                Membership::No
            } else if *right {
                subgroup_member(b, inner, &Word(nf.letters().iter().map(|l| l.unshifted(n1)).collect()), radius)?
            } else {
                subgroup_member(a, inner, &nf, radius)?
            }
        }
        _ => exhaustive(p, s, &nf, radius)?,
    })
}

fn exhaustive(p: &Presentation, s: &SubgroupSpec, target: &Word, radius: usize) -> Result<Membership, GroupError> {
    let steps: Vec<Word> = s.generators.iter().flat_map(|g| [g.clone(), g.inverse()]).collect();
    let mut seen: HashSet<Word> = HashSet::from([Word::empty()]);
    let mut queue = VecDeque::from([(Word::empty(), 0usize)]);
    while let Some((h, d)) = queue.pop_front() {
        if d == radius {
            continue;
        }
        for step in &steps {
            let next = p.multiply(&h, step)?;
            if next == *target {
                return Ok(Membership::Yes);
            }
            if seen.len() < EXHAUSTIVE_CAP && seen.insert(next.clone()) {
                queue.push_back((next, d + 1));
            }
        }
    }
    Ok(Membership::Unknown)
}

impl Lattice {
    pub fn new(n: usize, vectors: Vec<Vec<i64>>) -> Self {
        let mut rows: Vec<Vec<i64>> = vectors.into_iter().filter(|v| v.iter().any(|&x| x != 0)).collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in 0..n {
            if r == rows.len() {
                break;
            }
            // Euclid on column `col` among rows r.. until a single nonzero remains.
            loop {
                let nonzero: Vec<usize> = (r..rows.len()).filter(|&i| rows[i][col] != 0).collect();
                if nonzero.len() <= 1 {
                    if let Some(&i) = nonzero.first() {
                        rows.swap(r, i);
                    }
                    break;
                }
                let min = *nonzero.iter().min_by_key(|&&i| rows[i][col].abs()).unwrap();
                for &i in &nonzero {
                    if i != min {
                        let f = rows[i][col] / rows[min][col];
                        let m = rows[min].clone();
                        for (x, y) in rows[i].iter_mut().zip(m) {
                            *x -= f * y;
                        }
                    }
                }
            }
            if rows[r][col] != 0 {
                if rows[r][col] < 0 {
                    rows[r].iter_mut().for_each(|x| *x = -*x);
                }
                pivots.push(col);
                r += 1;
            }
        }
        rows.truncate(r);
        Lattice { rows, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Unique representative of `v + L` with pivot entries in `[0, pivot)`.
    pub fn reduce(&self, mut v: Vec<i64>) -> Vec<i64> {
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            let f = v[c].div_euclid(row[c]);
            for (x, y) in v.iter_mut().zip(row) {
                *x -= f * y;
            }
        }
        v
    }

    pub fn contains(&self, v: Vec<i64>) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }
}
