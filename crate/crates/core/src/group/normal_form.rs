use crate::error::GroupError;
use crate::word::{Letter, Word};

use super::presentation::{Presentation, RewriteSystem, Strategy};

impl Presentation {
    /// Canonical representative of `w`. Idempotent; equal outputs exactly
    /// when the inputs represent the same element.
    pub fn normal_form(&self, w: &Word) -> Result<Word, GroupError> {
        self.check_word(w)?;
        reduce(self, w.letters()).map(Word)
    }

    pub fn multiply(&self, u: &Word, v: &Word) -> Result<Word, GroupError> {
        self.normal_form(&u.concat(v))
    }

    pub fn invert(&self, u: &Word) -> Result<Word, GroupError> {
        self.normal_form(&u.inverse())
    }

    pub fn is_identity(&self, w: &Word) -> Result<bool, GroupError> {
        Ok(self.normal_form(w)?.is_empty())
    }

    pub fn equal(&self, u: &Word, v: &Word) -> Result<bool, GroupError> {
        Ok(self.normal_form(u)? == self.normal_form(v)?)
    }
}

fn reduce(p: &Presentation, w: &[Letter]) -> Result<Vec<Letter>, GroupError> {
    match p.strategy() {
        Strategy::FreeGroup => Ok(free_reduce(w)),
        Strategy::FreeAbelian(n) => Ok(abelian_word(&exponents(*n, w))),
        Strategy::Heisenberg => Ok(heisenberg_word(heisenberg_coords(w))),
        Strategy::BaumslagSolitar { p: bp, q } => Ok(BsForm::from_letters(*bp, *q, w).to_letters()),
        Strategy::DirectProduct(a, b) => {
            let n1 = a.generator_count();
            let (mut left, mut right) = (Vec::new(), Vec::new());
            for &l in w {
                if l.generator() < n1 {
                    left.push(l);
                } else {
                    right.push(l.unshifted(n1));
                }
            }
            let mut out = reduce(a, &left)?;
            out.extend(reduce(b, &right)?.into_iter().map(|l| l.shifted(n1)));
            Ok(out)
        }
        Strategy::FreeProduct(a, b) => free_product_reduce(a, b, w),
        Strategy::GenericRewriting(rs) => rewrite(rs, w),
    }
}

pub(crate) fn free_reduce(w: &[Letter]) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(w.len());
    for &l in w {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

pub(crate) fn exponents(n: usize, w: &[Letter]) -> Vec<i64> {
    let mut v = vec![0i64; n];
    for &l in w {
        v[l.generator()] += if l.is_inverse() { -1 } else { 1 };
    }
    v
}

pub(crate) fn abelian_word(v: &[i64]) -> Vec<Letter> {
    let mut out = Vec::new();
    for (g, &e) in v.iter().enumerate() {
        out.extend(std::iter::repeat_n(Letter::new(g, e < 0), e.unsigned_abs() as usize));
    }
    out
}

/// Coordinates `(a, b, c)` of `xᵃ yᵇ zᶜ`.
pub(crate) fn heisenberg_coords(w: &[Letter]) -> (i64, i64, i64) {
    let (mut a, mut b, mut c) = (0i64, 0i64, 0i64);
    for &l in w {
        match (l.generator(), l.is_inverse()) {
            (0, false) => {
                a += 1;
                c -= b;
            }
            (0, true) => {
                a -= 1;
                c += b;
            }
            (1, inv) => b += if inv { -1 } else { 1 },
            (_, inv) => c += if inv { -1 } else { 1 },
        }
    }
    (a, b, c)
}

pub(crate) fn heisenberg_word((a, b, c): (i64, i64, i64)) -> Vec<Letter> {
    abelian_word(&[a, b, c])
}

/// Britton normal form `b^k0 a^e1 b^k1 ... a^en b^kn` with each `e = ±1`
/// and every non-final `k` reduced modulo `|q|` (before `a`) or `|p|`
/// (before `a⁻¹`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct BsForm {
    p: i64,
    q: i64,
    pub(crate) ks: Vec<i64>,
    pub(crate) es: Vec<i8>,
}

impl BsForm {
    pub(crate) fn from_letters(p: i64, q: i64, w: &[Letter]) -> Self {
        let mut f = BsForm {
            p,
            q,
            ks: vec![0],
            es: Vec::new(),
        };
        for &l in w {
            let e: i8 = if l.is_inverse() { -1 } else { 1 };
            if l.generator() == 1 {
                *f.ks.last_mut().unwrap() += e as i64;
            } else {
                f.push_t(e);
            }
        }
        f
    }

    fn push_t(&mut self, e: i8) {
        let n = self.es.len();
        let k = self.ks[n];
        if n > 0 && self.es[n - 1] == -e {
            // t bᵏ t⁻¹ = b^(qk/p) when p | k; t⁻¹ bᵏ t = b^(pk/q) when q | k.
            let (div, mul) = if e == -1 { (self.p, self.q) } else { (self.q, self.p) };
            if k % div == 0 {
                self.es.pop();
                self.ks.pop();
                self.ks[n - 1] += mul * (k / div);
                return;
            }
        }
        // bᵏ t = bʳ t b^(pm) with k = qm + r; bᵏ t⁻¹ = bʳ t⁻¹ b^(qm) with k = pm + r.
        let (div, mul) = if e == 1 { (self.q, self.p) } else { (self.p, self.q) };
        let (m, r) = (k.div_euclid(div), k.rem_euclid(div));
        self.ks[n] = r;
        self.es.push(e);
        self.ks.push(mul * m);
    }

    pub(crate) fn to_letters(&self) -> Vec<Letter> {
        let b = |k: i64| std::iter::repeat_n(Letter::new(1, k < 0), k.unsigned_abs() as usize);
        let mut out: Vec<Letter> = b(self.ks[0]).collect();
        for (i, &e) in self.es.iter().enumerate() {
            out.push(Letter::new(0, e < 0));
            out.extend(b(self.ks[i + 1]));
        }
        out
    }
}

/// Alternating syllables, each in its factor's normal form.
fn free_product_reduce(a: &Presentation, b: &Presentation, w: &[Letter]) -> Result<Vec<Letter>, GroupError> {
    let n1 = a.generator_count();
    let mut syllables: Vec<(bool, Vec<Letter>)> = Vec::new();
    for &l in w {
        let right = l.generator() >= n1;
        let local = if right { l.unshifted(n1) } else { l };
        match syllables.last_mut() {
            Some((side, letters)) if *side == right => {
                letters.push(local);
                let factor = if right { b } else { a };
                *letters = reduce(factor, letters)?;
                if letters.is_empty() {
                    syllables.pop();
                }
            }
            _ => {
                let factor = if right { b } else { a };
                let s = reduce(factor, &[local])?;
                if !s.is_empty() {
                    syllables.push((right, s));
                }
            }
        }
    }
    Ok(syllables
        .into_iter()
        .flat_map(|(right, s)| s.into_iter().map(move |l| if right { l.shifted(n1) } else { l }))
        .collect())
}

/// Suffix-driven shortlex rewriting with implicit free cancellation.
fn rewrite(rs: &RewriteSystem, w: &[Letter]) -> Result<Vec<Letter>, GroupError> {
    if !rs.is_confluent() {
        return Err(GroupError::NonConfluentRules);
    }
    let mut out: Vec<Letter> = Vec::with_capacity(w.len());
    let mut pending: Vec<Letter> = w.iter().rev().copied().collect();
    while let Some(l) = pending.pop() {
        if out.last() == Some(&l.inverse()) {
            out.pop();
            continue;
        }
        out.push(l);
        if let Some((lhs, rhs)) = rs.rules().iter().find(|(lhs, _)| out.ends_with(lhs.letters())) {
            out.truncate(out.len() - lhs.len());
            pending.extend(rhs.letters().iter().rev());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(p: &Presentation, s: &str) -> Word {
        p.parse_word(s).unwrap()
    }

    fn nf(p: &Presentation, s: &str) -> String {
        p.word_string(&p.normal_form(&word(p, s)).unwrap())
    }

    #[test]
    fn small_examples() {
        let f2 = Presentation::free(2);
        assert_eq!(nf(&f2, "aa-b"), "b");
        let z2 = Presentation::free_abelian(2);
        assert_eq!(nf(&z2, "xyx-"), "y");
        assert_eq!(p_mul(&z2, "xy", "x"), "xxy");
        assert_eq!(p_mul(&f2, "ab", "b-a"), "aa");
        assert_eq!(p_mul(&f2, "a", "a-"), "1");
        let bs = Presentation::baumslag_solitar(1, 2).unwrap();
        assert_eq!(nf(&bs, "aba-"), "bb");
    }

    fn p_mul(p: &Presentation, u: &str, v: &str) -> String {
        p.word_string(&p.multiply(&word(p, u), &word(p, v)).unwrap())
    }

    #[test]
    fn heisenberg_commutator_is_central() {
        let h = Presentation::heisenberg();
        assert_eq!(nf(&h, "xyx-y-"), "z");
        assert_eq!(nf(&h, "yx"), "xyz-");
        for r in h.relators() {
            assert!(h.is_identity(r).unwrap());
        }
    }

    #[test]
    fn bs_relator_and_negative_parameters() {
        for (p, q) in [(1, 2), (2, 3), (-2, 3), (3, -2), (1, 1), (2, 2)] {
            let g = Presentation::baumslag_solitar(p, q).unwrap();
            assert!(g.is_identity(&g.relators()[0]).unwrap(), "BS({p},{q})");
            let w = word(&g, "ab^5a-ba-b^-3ab");
            let n = g.normal_form(&w).unwrap();
            assert_eq!(g.normal_form(&n).unwrap(), n);
            assert!(g.is_identity(&w.concat(&n.inverse())).unwrap());
        }
    }

    #[test]
    fn products() {
        let p = Presentation::from_spec("product(free:2;abelian:1)").unwrap();
        assert_eq!(p.alphabet().names(), &['a', 'b', 'x']);
        assert_eq!(nf(&p, "axbx-a-"), "aba-");
        let fp = Presentation::from_spec("freeproduct(abelian:2;free:1)").unwrap();
        assert_eq!(nf(&fp, "xyaa-x-"), "y");
        assert_eq!(nf(&fp, "yxa"), "xya");
    }
}
