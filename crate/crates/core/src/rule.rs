//! Life-Like rules in Golly birth/survival notation.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Largest neighbor count in a Moore neighborhood.
pub const MAX_NEIGHBORS: u8 = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("malformed rule {0:?}: expected B<digits>/S<digits>")]
    Malformed(String),
    #[error("neighbor count {0} out of range 0..=8")]
    DigitOutOfRange(char),
    #[error("neighbor count {0} listed twice")]
    RepeatedDigit(char),
}

/// Set of Moore neighbor counts, one bit per count 0..=8.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CountSet(u16);

impl CountSet {
    pub const EMPTY: CountSet = CountSet(0);

    pub fn contains(self, count: u8) -> bool {
        count <= MAX_NEIGHBORS && self.0 & (1 << count) != 0
    }

    pub fn insert(&mut self, count: u8) -> bool {
        assert!(count <= MAX_NEIGHBORS, "neighbor count {count} out of range");
        let fresh = !self.contains(count);
        self.0 |= 1 << count;
        fresh
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn bits(self) -> u16 {
        self.0
    }

    pub fn iter(self) -> impl Iterator<Item = u8> {
        (0..=MAX_NEIGHBORS).filter(move |&k| self.contains(k))
    }
}

impl FromIterator<u8> for CountSet {
    fn from_iter<I: IntoIterator<Item = u8>>(iter: I) -> Self {
        let mut set = CountSet::EMPTY;
        for k in iter {
            set.insert(k);
        }
        set
    }
}

/// A two-state outer-totalistic rule over the Moore neighborhood.
///
/// Equality compares the birth and survival sets only; the optional name is a
/// label and does not take part.
#[derive(Debug, Clone)]
pub struct Rule {
    birth: CountSet,
    survival: CountSet,
    name: Option<String>,
}

impl Rule {
    pub fn new(birth: CountSet, survival: CountSet) -> Self {
        Rule { birth, survival, name: None }
    }

    pub fn parse(text: &str) -> Result<Rule, RuleError> {
        let malformed = || RuleError::Malformed(text.to_string());
        let (b, s) = text.split_once(['/', '\\']).ok_or_else(malformed)?;
        let b = b.strip_prefix(['B', 'b']).ok_or_else(malformed)?;
        let s = s.strip_prefix(['S', 's']).ok_or_else(malformed)?;
        Ok(Rule::new(parse_counts(b)?, parse_counts(s)?))
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn birth(&self) -> CountSet {
        self.birth
    }

    pub fn survival(&self) -> CountSet {
        self.survival
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// Canonical notation, e.g. `B3/S23`.
    pub fn notation(&self) -> String {
        self.to_string()
    }

    /// True when a dead cell with no live neighbors is born.
    pub fn births_on_zero(&self) -> bool {
        self.birth.contains(0)
    }
}

fn parse_counts(digits: &str) -> Result<CountSet, RuleError> {
    let mut set = CountSet::EMPTY;
    for c in digits.chars() {
        let k = c.to_digit(10).ok_or(RuleError::DigitOutOfRange(c))?;
        if k > u32::from(MAX_NEIGHBORS) {
            return Err(RuleError::DigitOutOfRange(c));
        }
        if !set.insert(k as u8) {
            return Err(RuleError::RepeatedDigit(c));
        }
    }
    Ok(set)
}

impl PartialEq for Rule {
    fn eq(&self, other: &Self) -> bool {
        self.birth == other.birth && self.survival == other.survival
    }
}

impl Eq for Rule {}

impl std::hash::Hash for Rule {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.birth.hash(state);
        self.survival.hash(state);
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("B")?;
        for k in self.birth.iter() {
            write!(f, "{k}")?;
        }
        f.write_str("/S")?;
        for k in self.survival.iter() {
            write!(f, "{k}")?;
        }
        Ok(())
    }
}

impl FromStr for Rule {
    type Err = RuleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Rule::parse(s)
    }
}

/// Named rules available to the ranking sweep and the command line.
#[derive(Debug, Clone)]
pub struct RuleCatalog {
    entries: Vec<Rule>,
}

const DEFAULT_CATALOG: &[(&str, &str)] = &[
    ("Life", "B3/S23"),
    ("HighLife", "B36/S23"),
    ("B23/S36", "B23/S36"),
    ("Fredkin", "B1357/S02468"),
    ("Amoeba", "B357/S1358"),
    ("Seeds", "B2/S"),
    ("Replicator", "B1357/S1357"),
    ("Day&Night", "B3678/S34678"),
    ("2x2", "B36/S125"),
    ("Diamoeba", "B35678/S5678"),
    ("Coral", "B3/S45678"),
    ("Anneal", "B4678/S35678"),
];

impl RuleCatalog {
    /// Builds a catalog, rejecting duplicate names.
    pub fn new(entries: Vec<Rule>) -> Result<RuleCatalog, RuleError> {
        for (i, rule) in entries.iter().enumerate() {
            if let Some(name) = rule.name() {
                if entries[..i].iter().any(|r| r.name() == Some(name)) {
                    return Err(RuleError::Malformed(format!("duplicate catalog name {name}")));
                }
            }
        }
        Ok(RuleCatalog { entries })
    }

    pub fn entries(&self) -> &[Rule] {
        &self.entries
    }

    pub fn get(&self, name: &str) -> Option<&Rule> {
        self.entries
            .iter()
            .find(|r| r.name().is_some_and(|n| n.eq_ignore_ascii_case(name)))
    }

    /// Looks a rule up by catalog name, falling back to B/S notation.
    pub fn resolve(&self, text: &str) -> Result<Rule, RuleError> {
        match self.get(text) {
            Some(rule) => Ok(rule.clone()),
            None => Rule::parse(text),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl Default for RuleCatalog {
    fn default() -> Self {
        catalog()
    }
}

/// The built-in catalog, in a fixed order.
pub fn catalog() -> RuleCatalog {
    let entries = DEFAULT_CATALOG
        .iter()
        .map(|(name, text)| Rule::parse(text).expect("built-in rule").with_name(*name))
        .collect();
    RuleCatalog { entries }
}
