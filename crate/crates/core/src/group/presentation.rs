use std::fmt;

use crate::error::{GroupError, ParseError};
use crate::word::{Alphabet, Letter, Word};

use super::subgroup::SubgroupSpec;

/// How the word problem is solved for a presentation.
#[derive(Clone, Debug, PartialEq)]
pub enum Strategy {
    FreeGroup,
    /// Canonical order: generator index, exponents as signed counts.
    FreeAbelian(usize),
    /// Generators `x, y, z` with `z = x y x⁻¹ y⁻¹` central.
    Heisenberg,
    /// `⟨a, b | a bᵖ a⁻¹ = b^q⟩`, `a` is the stable letter.
    BaumslagSolitar { p: i64, q: i64 },
    DirectProduct(Box<Presentation>, Box<Presentation>),
    FreeProduct(Box<Presentation>, Box<Presentation>),
    GenericRewriting(RewriteSystem),
}

/// Shortlex-decreasing rules `lhs → rhs`. Free cancellation is implicit.
#[derive(Clone, Debug, PartialEq)]
pub struct RewriteSystem {
    pub(crate) rules: Vec<(Word, Word)>,
    pub(crate) confluent: bool,
}

impl RewriteSystem {
    pub fn new(rules: Vec<(Word, Word)>, confluent: bool) -> Result<Self, GroupError> {
        let rules = rules
            .into_iter()
            .map(|(l, r)| match l.shortlex_cmp(&r) {
                std::cmp::Ordering::Greater => Ok((l, r)),
                std::cmp::Ordering::Less => Ok((r, l)),
                std::cmp::Ordering::Equal => Err(GroupError::RuleNotDecreasing(format!("{l:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(RewriteSystem { rules, confluent })
    }

    pub fn rules(&self) -> &[(Word, Word)] {
        &self.rules
    }

    pub fn is_confluent(&self) -> bool {
        self.confluent
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Presentation {
    alphabet: Alphabet,
    relators: Vec<Word>,
    strategy: Strategy,
    peripherals: Vec<SubgroupSpec>,
}

const FREE_NAMES: &str = "abcdefghijklmnopqrstuvwxyz";
const ABELIAN_NAMES: &str = "xyzwuvtsrqponmlkjihgfedcba";

impl Presentation {
    pub fn free(rank: usize) -> Self {
        Presentation {
            alphabet: Alphabet::standard(rank, FREE_NAMES),
            relators: Vec::new(),
            strategy: Strategy::FreeGroup,
            peripherals: Vec::new(),
        }
    }

    pub fn free_abelian(rank: usize) -> Self {
        let mut relators = Vec::new();
        for i in 0..rank {
            for j in i + 1..rank {
                relators.push(commutator(Letter::new(i, false), Letter::new(j, false)));
            }
        }
        Presentation {
            alphabet: Alphabet::standard(rank, ABELIAN_NAMES),
            relators,
            strategy: Strategy::FreeAbelian(rank),
            peripherals: Vec::new(),
        }
    }

    pub fn heisenberg() -> Self {
        let (x, y, z) = (Letter::new(0, false), Letter::new(1, false), Letter::new(2, false));
        let mut xyz = commutator(x, y);
        xyz.0.push(z.inverse());
        Presentation {
            alphabet: Alphabet::standard(3, "xyz"),
            relators: vec![xyz, commutator(x, z), commutator(y, z)],
            strategy: Strategy::Heisenberg,
            peripherals: Vec::new(),
        }
    }

    pub fn baumslag_solitar(p: i64, q: i64) -> Result<Self, GroupError> {
        if p == 0 || q == 0 {
            return Err(GroupError::BadParameter(format!("BS({p},{q}) needs nonzero exponents")));
        }
        let (a, b) = (Letter::new(0, false), Letter::new(1, false));
        let b_word = Word::letter(b);
        let relator = Word::letter(a)
            .concat(&b_word.power(p))
            .concat(&Word::letter(a.inverse()))
            .concat(&b_word.power(-q));
        Ok(Presentation {
            alphabet: Alphabet::standard(2, "ab"),
            relators: vec![relator],
            strategy: Strategy::BaumslagSolitar { p, q },
            peripherals: Vec::new(),
        })
    }

    pub fn direct_product(left: Presentation, right: Presentation) -> Result<Self, GroupError> {
        let n1 = left.alphabet.generator_count();
        let alphabet = joined_alphabet(&left.alphabet, &right.alphabet)?;
        let mut relators: Vec<Word> = left.relators.clone();
        relators.extend(right.relators.iter().map(|r| shift(r, n1)));
        for i in 0..n1 {
            for j in 0..right.alphabet.generator_count() {
                relators.push(commutator(Letter::new(i, false), Letter::new(n1 + j, false)));
            }
        }
        Ok(Presentation {
            alphabet,
            relators,
            strategy: Strategy::DirectProduct(Box::new(left.without_peripherals()), Box::new(right.without_peripherals())),
            peripherals: Vec::new(),
        })
    }

    pub fn free_product(left: Presentation, right: Presentation) -> Result<Self, GroupError> {
        let n1 = left.alphabet.generator_count();
        let alphabet = joined_alphabet(&left.alphabet, &right.alphabet)?;
        let mut relators: Vec<Word> = left.relators.clone();
        relators.extend(right.relators.iter().map(|r| shift(r, n1)));
        Ok(Presentation {
            alphabet,
            relators,
            strategy: Strategy::FreeProduct(Box::new(left.without_peripherals()), Box::new(right.without_peripherals())),
            peripherals: Vec::new(),
        })
    }

    /// A rewriting presentation. Each relator `r` contributes the rule `r → 1`.
    pub fn rewriting(alphabet: Alphabet, relators: Vec<Word>, rules: Vec<(Word, Word)>, confluent: bool) -> Result<Self, GroupError> {
        let mut all_rules = rules;
        for r in &relators {
            all_rules.push((r.clone(), Word::empty()));
        }
        let system = RewriteSystem::new(all_rules, confluent)?;
        let p = Presentation {
            alphabet,
            relators,
            strategy: Strategy::GenericRewriting(system),
            peripherals: Vec::new(),
        };
        for r in p.relators.iter().chain(p.rules_as_words().iter()) {
            p.check_word(r)?;
        }
        Ok(p)
    }

    fn rules_as_words(&self) -> Vec<Word> {
        match &self.strategy {
            Strategy::GenericRewriting(rs) => rs.rules.iter().map(|(l, r)| l.concat(&r.inverse())).collect(),
            _ => Vec::new(),
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn generator_count(&self) -> usize {
        self.alphabet.generator_count()
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn strategy(&self) -> &Strategy {
        &self.strategy
    }

    pub fn peripherals(&self) -> &[SubgroupSpec] {
        &self.peripherals
    }

    pub fn without_peripherals(&self) -> Presentation {
        Presentation {
            peripherals: Vec::new(),
            ..self.clone()
        }
    }

    /// Attaches peripheral subgroups given by generating words.
    pub fn with_peripherals(mut self, generators: Vec<Vec<Word>>) -> Result<Self, GroupError> {
        let base = self.without_peripherals();
        self.peripherals = generators
            .into_iter()
            .map(|g| SubgroupSpec::new(&base, g))
            .collect::<Result<_, _>>()?;
        Ok(self)
    }

    /// Renames the generators, keeping the group.
    pub fn renamed(mut self, names: Vec<char>) -> Result<Self, ParseError> {
        if names.len() != self.alphabet.generator_count() {
            return Err(ParseError::GeneratorCountMismatch {
                expected: self.alphabet.generator_count(),
                found: names.len(),
            });
        }
        self.alphabet = Alphabet::new(names)?;
        Ok(self)
    }

    /// Adds relators after checking they hold in the group.
    pub fn with_checked_relators(mut self, relators: Vec<Word>) -> Result<Self, GroupError> {
        for r in relators {
            if !self.normal_form(&r)?.is_empty() {
                return Err(GroupError::RelatorMismatch(self.alphabet.display(&r).to_string()));
            }
            if !self.relators.contains(&r) {
                self.relators.push(r);
            }
        }
        Ok(self)
    }

    pub fn check_word(&self, w: &Word) -> Result<(), GroupError> {
        match w.letters().iter().find(|l| !self.alphabet.contains(**l)) {
            Some(l) => Err(GroupError::UnsupportedWord(l.index())),
            None => Ok(()),
        }
    }

    pub fn parse_word(&self, text: &str) -> Result<Word, ParseError> {
        self.alphabet.parse_word(text)
    }

    pub fn word_string(&self, w: &Word) -> String {
        self.alphabet.display(w).to_string()
    }

    /// Compact description in the group-spec grammar (`free:2`, `bs:1,2`, ...).
    pub fn describe(&self) -> String {
        match &self.strategy {
            Strategy::FreeGroup => format!("free:{}", self.generator_count()),
            Strategy::FreeAbelian(n) => format!("abelian:{n}"),
            Strategy::Heisenberg => "heis".to_string(),
            Strategy::BaumslagSolitar { p, q } => format!("bs:{p},{q}"),
            Strategy::DirectProduct(a, b) => format!("product({};{})", a.describe(), b.describe()),
            Strategy::FreeProduct(a, b) => format!("freeproduct({};{})", a.describe(), b.describe()),
            Strategy::GenericRewriting(_) => "rewrite".to_string(),
        }
    }

    /// Parses the group-spec grammar used on the command line:
    /// `free:n`, `abelian:n`, `heis`, `bs:p,q`, `product(A;B)`,
    /// `freeproduct(A;B)`.
    pub fn from_spec(spec: &str) -> Result<Self, GroupError> {
        let spec = spec.trim();
        let bad = || GroupError::Parse(ParseError::BadStrategy(spec.to_string()));
        if let Some(inner) = strip_call(spec, "product") {
            let (a, b) = split_pair(inner).ok_or_else(bad)?;
            return Presentation::direct_product(Presentation::from_spec(a)?, Presentation::from_spec(b)?);
        }
        if let Some(inner) = strip_call(spec, "freeproduct") {
            let (a, b) = split_pair(inner).ok_or_else(bad)?;
            return Presentation::free_product(Presentation::from_spec(a)?, Presentation::from_spec(b)?);
        }
        let (head, arg) = match spec.split_once(':') {
            Some((h, a)) => (h.trim(), Some(a.trim())),
            None => (spec, None),
        };
        let count = |arg: Option<&str>| -> Result<usize, GroupError> {
            let arg = arg.ok_or_else(bad)?;
            let n: usize = arg.parse().map_err(|_| ParseError::BadNumber(arg.to_string()))?;
            if n == 0 || n > 26 {
                return Err(GroupError::BadParameter(format!("rank {n} out of range 1..=26")));
            }
            Ok(n)
        };
        match head {
            "free" => Ok(Presentation::free(count(arg)?)),
            "abelian" => Ok(Presentation::free_abelian(count(arg)?)),
            "heis" if arg.is_none() => Ok(Presentation::heisenberg()),
            "bs" => {
                let (p, q) = arg.and_then(|a| a.split_once(',')).ok_or_else(bad)?;
                let parse = |s: &str| -> Result<i64, GroupError> {
                    let v: i64 = s.trim().parse().map_err(|_| ParseError::BadNumber(s.to_string()))?;
                    if v.abs() > 1000 {
                        return Err(GroupError::BadParameter(format!("exponent {v} too large")));
                    }
                    Ok(v)
                };
                Presentation::baumslag_solitar(parse(p)?, parse(q)?)
            }
            _ => Err(bad()),
        }
    }

    /// Parses the presentation file format:
    ///
    /// ```text
    /// generators: a b
    /// strategy: bs:1,2
    /// relator: aba-b--
    /// peripheral: b
    /// ```
    ///
    /// `strategy: rewrite` additionally accepts `rule: lhs = rhs` lines and
    /// `confluent: yes|no`. Unknown keys are rejected.
    pub fn parse_file(text: &str) -> Result<Self, GroupError> {
        let mut generators: Option<Vec<char>> = None;
        let mut strategy: Option<String> = None;
        let mut confluent: Option<bool> = None;
        let mut relators = Vec::new();
        let mut peripherals = Vec::new();
        let mut rules = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once(':').ok_or_else(|| ParseError::BadLine {
                line: line_no,
                text: line.to_string(),
            })?;
            let (key, value) = (key.trim(), value.trim());
            let duplicate = || ParseError::Duplicate {
                line: line_no,
                key: key.to_string(),
            };
            match key {
                "generators" => {
                    if generators.is_some() {
                        return Err(duplicate().into());
                    }
                    let mut names = Vec::new();
                    for token in value.split_whitespace() {
                        let mut chars = token.chars();
                        match (chars.next(), chars.next()) {
                            (Some(c), None) => names.push(c),
                            _ => return Err(ParseError::BadGeneratorName(token.to_string()).into()),
                        }
                    }
                    Alphabet::new(names.clone())?;
                    generators = Some(names);
                }
                "strategy" => {
                    if strategy.is_some() {
                        return Err(duplicate().into());
                    }
                    strategy = Some(value.to_string());
                }
                "confluent" => {
                    if confluent.is_some() {
                        return Err(duplicate().into());
                    }
                    confluent = Some(match value {
                        "yes" | "true" => true,
                        "no" | "false" => false,
                        _ => return Err(ParseError::BadLine { line: line_no, text: line.to_string() }.into()),
                    });
                }
                "relator" => relators.push((line_no, value.to_string())),
                "peripheral" => peripherals.push(value.to_string()),
                "rule" => rules.push((line_no, value.to_string())),
                _ => {
                    return Err(ParseError::UnknownKey {
                        line: line_no,
                        key: key.to_string(),
                    }
                    .into())
                }
            }
        }
        let names = generators.ok_or(ParseError::Missing("generators"))?;
        let strategy = strategy.ok_or(ParseError::Missing("strategy"))?;
        let alphabet = Alphabet::new(names.clone())?;
        let parse_words = |items: &[(usize, String)]| -> Result<Vec<Word>, GroupError> {
            items.iter().map(|(_, t)| Ok(alphabet.parse_word(t)?)).collect()
        };
        let relator_words = parse_words(&relators)?;

        let base = if strategy == "rewrite" {
            let mut parsed = Vec::new();
            for (line_no, text) in &rules {
                let (l, r) = text.split_once('=').ok_or_else(|| ParseError::BadLine {
                    line: *line_no,
                    text: text.clone(),
                })?;
                parsed.push((alphabet.parse_word(l)?, alphabet.parse_word(r)?));
            }
            Presentation::rewriting(alphabet.clone(), relator_words, parsed, confluent.unwrap_or(false))?
        } else {
            if !rules.is_empty() || confluent.is_some() {
                return Err(ParseError::BadStrategy(format!("`rule`/`confluent` need `strategy: rewrite`, found `{strategy}`")).into());
            }
            let group = match strategy.as_str() {
                "free" => Presentation::free(names.len()),
                "abelian" => Presentation::free_abelian(names.len()),
                "product" | "freeproduct" => {
                    return Err(ParseError::BadStrategy(format!("`{strategy}` needs factors, e.g. `{strategy}(free:1;abelian:1)`")).into())
                }
                other => Presentation::from_spec(other)?,
            };
            if group.generator_count() != names.len() {
                return Err(ParseError::GeneratorCountMismatch {
                    expected: group.generator_count(),
                    found: names.len(),
                }
                .into());
            }
            group.renamed(names)?.with_checked_relators(relator_words)?
        };
        let peripheral_words = peripherals
            .iter()
            .map(|line| {
                line.split_whitespace()
                    .map(|t| Ok(base.alphabet.parse_word(t)?))
                    .collect::<Result<Vec<Word>, GroupError>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        base.with_peripherals(peripheral_words)
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

pub(crate) fn commutator(x: Letter, y: Letter) -> Word {
    Word(vec![x, y, x.inverse(), y.inverse()])
}

fn shift(w: &Word, generators: usize) -> Word {
    Word::from_letters(w.letters().iter().map(|l| l.shifted(generators)))
}

fn joined_alphabet(left: &Alphabet, right: &Alphabet) -> Result<Alphabet, GroupError> {
    let mut names: Vec<char> = left.names().to_vec();
    for &c in right.names() {
        if names.contains(&c) {
            let fresh = FREE_NAMES
                .chars()
                .find(|f| !names.contains(f) && !right.names().contains(f))
                .ok_or(ParseError::TooManyGenerators(left.generator_count() + right.generator_count()))?;
            names.push(fresh);
        } else {
            names.push(c);
        }
    }
    Ok(Alphabet::new(names)?)
}

fn strip_call<'a>(spec: &'a str, name: &str) -> Option<&'a str> {
    spec.strip_prefix(name)?.trim_start().strip_prefix('(')?.strip_suffix(')')
}

fn split_pair(inner: &str) -> Option<(&str, &str)> {
    let mut depth = 0i32;
    for (i, c) in inner.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ';' if depth == 0 => return Some((&inner[..i], &inner[i + 1..])),
            _ => {}
        }
        if depth < 0 {
            return None;
        }
    }
    None
}
