//! Labels and alphabets.
//!
//! A label is either a base symbol or a finite set of labels. Set labels are
//! what the power-set constructions produce; they nest arbitrarily.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// The one non-alphanumeric base symbol accepted, used for "no input".
pub const BOTTOM: &str = "⊥";

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Label {
    Base(String),
    /// A marked labeled ball, as produced when compiling a general LCL into a
    /// node-edge-checkable one. Rendered verbatim; always starts with `@`.
    Ball(String),
    /// Elements are kept in the order they were given; constructors that
    /// build sets from an alphabet pass them in canonical order.
    Set(Vec<Label>),
}

impl Label {
    pub fn base(s: impl Into<String>) -> Label {
        Label::Base(s.into())
    }

    pub fn set(elements: Vec<Label>) -> Label {
        Label::Set(elements)
    }

    pub fn empty_set() -> Label {
        Label::Set(Vec::new())
    }

    pub fn bottom() -> Label {
        Label::Base(BOTTOM.to_string())
    }

    pub fn is_set(&self) -> bool {
        matches!(self, Label::Set(_))
    }

    pub fn elements(&self) -> Option<&[Label]> {
        match self {
            Label::Set(e) => Some(e),
            Label::Base(_) | Label::Ball(_) => None,
        }
    }

    /// Number of elements of a set label; 0 for base labels.
    pub fn cardinality(&self) -> usize {
        self.elements().map_or(0, <[Label]>::len)
    }

    pub fn render(&self) -> String {
        self.to_string()
    }

    /// Parses one label token: a base symbol, `{}`, or a brace list such as
    /// `{A,{B,C}}`.
    pub fn parse(s: &str) -> Result<Label> {
        let mut p = LabelParser { s, pos: 0 };
        let l = p.label()?;
        if p.pos != s.len() {
            return Err(Error::InvalidLabel(s.to_string()));
        }
        Ok(l)
    }
}

pub fn is_base_symbol(s: &str) -> bool {
    s == BOTTOM
        || (!s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_'))
}

struct LabelParser<'a> {
    s: &'a str,
    pos: usize,
}

impl LabelParser<'_> {
    fn label(&mut self) -> Result<Label> {
        let rest = &self.s[self.pos..];
        if rest.starts_with('@') {
            let mut depth = 0i32;
            let mut end = rest.len();
            for (i, c) in rest.char_indices() {
                match c {
                    '(' | '[' | '{' => depth += 1,
                    ')' | ']' => depth -= 1,
                    '}' if depth == 0 => {
                        end = i;
                        break;
                    }
                    '}' => depth -= 1,
                    ',' if depth == 0 => {
                        end = i;
                        break;
                    }
                    c if c.is_whitespace() => {
                        end = i;
                        break;
                    }
                    _ => {}
                }
            }
            if end < 2 {
                return Err(Error::InvalidLabel(self.s.to_string()));
            }
            self.pos += end;
            return Ok(Label::Ball(rest[..end].to_string()));
        }
        if let Some(stripped) = rest.strip_prefix('{') {
            self.pos += 1;
            let mut elements = Vec::new();
            if stripped.starts_with('}') {
                self.pos += 1;
                return Ok(Label::Set(elements));
            }
            loop {
                elements.push(self.label()?);
                match self.s[self.pos..].chars().next() {
                    Some(',') => self.pos += 1,
                    Some('}') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(Error::InvalidLabel(self.s.to_string())),
                }
            }
            for (i, a) in elements.iter().enumerate() {
                if elements[..i].contains(a) {
                    return Err(Error::InvalidLabel(format!(
                        "{} (duplicate element {a})",
                        self.s
                    )));
                }
            }
            Ok(Label::Set(elements))
        } else {
            let end = rest
                .find([',', '}', '{', ' ', ':', ';', '(', ')', '[', ']'])
                .unwrap_or(rest.len());
            let sym = &rest[..end];
            if !is_base_symbol(sym) {
                return Err(Error::InvalidLabel(self.s.to_string()));
            }
            self.pos += end;
            Ok(Label::Base(sym.to_string()))
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Base(s) | Label::Ball(s) => f.write_str(s),
            Label::Set(e) => {
                f.write_str("{")?;
                for (i, l) in e.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{l}")?;
                }
                f.write_str("}")
            }
        }
    }
}

/// Context-free total order: base labels, then ball labels, then sets; base labels by symbol,
/// sets by cardinality and then by rendering. Inside a problem the alphabet's
/// declaration order takes precedence (see [`Alphabet::rank`]).
impl Ord for Label {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Label::Base(a), Label::Base(b)) | (Label::Ball(a), Label::Ball(b)) => a.cmp(b),
            (Label::Base(_), _) => Ordering::Less,
            (_, Label::Base(_)) => Ordering::Greater,
            (Label::Ball(_), Label::Set(_)) => Ordering::Less,
            (Label::Set(_), Label::Ball(_)) => Ordering::Greater,
            (Label::Set(a), Label::Set(b)) => a
                .len()
                .cmp(&b.len())
                .then_with(|| self.render().cmp(&other.render())),
        }
    }
}

impl PartialOrd for Label {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// An ordered, duplicate-free label sequence. Position defines the canonical
/// order used for sorting multisets and rendering configurations.
#[derive(Clone, Debug, Default)]
pub struct Alphabet {
    labels: Vec<Label>,
    index: HashMap<Label, u32>,
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels
    }
}
impl Eq for Alphabet {}

impl Alphabet {
    pub fn new(labels: Vec<Label>) -> Result<Alphabet> {
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i as u32).is_some() {
                return Err(Error::InvalidProblem(format!(
                    "duplicate label {l} in alphabet"
                )));
            }
        }
        Ok(Alphabet { labels, index })
    }

    pub fn from_symbols(symbols: &[&str]) -> Alphabet {
        Alphabet::new(symbols.iter().map(|s| Label::base(*s)).collect())
            .expect("symbols are distinct")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn get(&self, i: usize) -> &Label {
        &self.labels[i]
    }

    pub fn index_of(&self, l: &Label) -> Option<u32> {
        self.index.get(l).copied()
    }

    pub fn contains(&self, l: &Label) -> bool {
        self.index.contains_key(l)
    }

    /// Sort key: declared labels by position, unknown labels after all
    /// declared ones in context-free order.
    pub fn rank<'a>(&self, l: &'a Label) -> (usize, Option<&'a Label>) {
        match self.index_of(l) {
            Some(i) => (i as usize, None),
            None => (usize::MAX, Some(l)),
        }
    }

    pub fn sort(&self, labels: &mut [Label]) {
        labels.sort_by(|a, b| self.rank(a).cmp(&self.rank(b)));
    }

    pub fn iter(&self) -> impl Iterator<Item = &Label> {
        self.labels.iter()
    }
}
