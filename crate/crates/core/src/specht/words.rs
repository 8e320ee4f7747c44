use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Letter {
    X,
    Xdag,
}

/// A nonempty word in `X` and `X†`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn new(letters: Vec<Letter>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::Parse("a word needs at least one letter".into()));
        }
        Ok(Self { letters })
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Cyclic rotation by `k` letters to the left.
    pub fn rotate(&self, k: usize) -> Self {
        let mut letters = self.letters.clone();
        let len = letters.len();
        letters.rotate_left(k % len);
        Self { letters }
    }
}

/// Accepts `X`, `Xdag` and `X†`, optionally separated by whitespace,
/// e.g. `"XXdagXX"` or `"X X† X X"`.
impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut letters = Vec::new();
        let mut rest = s.trim_start();
        while !rest.is_empty() {
            if let Some(r) = rest.strip_prefix("Xdag").or_else(|| rest.strip_prefix("X†")) {
                letters.push(Letter::Xdag);
                rest = r;
            } else if let Some(r) = rest.strip_prefix('X') {
                letters.push(Letter::X);
                rest = r;
            } else {
                let at = s.len() - rest.len();
                return Err(Error::Parse(format!("word '{s}': unexpected input at byte {at}")));
            }
            rest = rest.trim_start();
        }
        Word::new(letters)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.letters {
            f.write_str(match l {
                Letter::X => "X",
                Letter::Xdag => "Xdag",
            })?;
        }
        Ok(())
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `tr w(H, H†)`.
pub fn word_trace(h: &ComplexMatrix, w: &Word) -> C64 {
    let hd = h.adjoint();
    let mut acc: Option<ComplexMatrix> = None;
    for l in w.letters() {
        let m = match l {
            Letter::X => h,
            Letter::Xdag => &hd,
        };
        acc = Some(match acc {
            None => m.clone(),
            Some(a) => &a * m,
        });
    }
    acc.expect("words are nonempty").trace()
}

fn w(s: &str) -> Word {
    s.parse().expect("static word")
}

/// Non-redundant words deciding unitary similarity for `n ∈ {2, 3}`.
///
/// `n = 2`: `X, X², XX†`. `n = 3`: `X, X², XX†, X³, X²X†, X²X†², X²X†²XX†`.
pub fn word_list(n: usize) -> Result<Vec<Word>> {
    match n {
        2 => Ok(vec![w("X"), w("XX"), w("XXdag")]),
        3 => Ok(vec![
            w("X"),
            w("XX"),
            w("XXdag"),
            w("XXX"),
            w("XXXdag"),
            w("XXXdagXdag"),
            w("XXXdagXdagXXdag"),
        ]),
        _ => Err(Error::Unsupported(format!(
            "word lists are available for n = 2 and n = 3 only, got n = {n}"
        ))),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WordTrace {
    pub word: Word,
    pub trace: C64,
}

/// Word traces of one matrix over a word list.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WordTraceProfile {
    pub entries: Vec<WordTrace>,
}

impl WordTraceProfile {
    pub fn new(h: &ComplexMatrix, words: &[Word]) -> Self {
        Self {
            entries: words
                .iter()
                .map(|w| WordTrace {
                    word: w.clone(),
                    trace: word_trace(h, w),
                })
                .collect(),
        }
    }

    /// Profile over [`word_list`] for the matrix dimension.
    pub fn canonical(h: &ComplexMatrix) -> Result<Self> {
        Ok(Self::new(h, &word_list(h.dim())?))
    }
}

/// Largest scaled difference between two profiles over the same words.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProfileDifference {
    pub word: Word,
    pub trace_a: C64,
    pub trace_b: C64,
    /// `|tr_a − tr_b| / s^{|w|}` with `s = max(‖A‖_F, ‖B‖_F)`.
    pub difference: f64,
}

/// Compares word traces of `a` and `b`, returning the worst word.
pub fn compare_profiles(a: &ComplexMatrix, b: &ComplexMatrix, words: &[Word]) -> Result<ProfileDifference> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "cannot compare {}x{} with {}x{}",
            a.dim(),
            a.dim(),
            b.dim(),
            b.dim()
        )));
    }
    let scale = a.frobenius_norm().max(b.frobenius_norm());
    let mut worst: Option<ProfileDifference> = None;
    for w in words {
        let (ta, tb) = (word_trace(a, w), word_trace(b, w));
        let denom = scale.powi(w.len() as i32);
        let difference = if denom > 0.0 {
            (ta - tb).norm() / denom
        } else {
            0.0
        };
        if worst.as_ref().is_none_or(|p| difference > p.difference) {
            worst = Some(ProfileDifference {
                word: w.clone(),
                trace_a: ta,
                trace_b: tb,
                difference,
            });
        }
    }
    worst.ok_or_else(|| Error::InvalidMatrix("empty word list".into()))
}

/// Specht test: `A = U B U†` for some unitary `U` iff all canonical word
/// traces agree (within `tol·s^{|w|}`).
pub fn unitary_similarity_test(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> Result<bool> {
    let words = word_list(a.dim())?;
    Ok(compare_profiles(a, b, &words)?.difference <= tol)
}
