use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// The fixed improving languages.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Language {
    /// `x1y`, `x` without 1, `|y| <= r - 1`.
    Uniform { r: usize },
    /// Well-indexed words: a unique 1 and `#{i : y_i <= c} <= c - 1` for
    /// every `c` in `1..=|y|`.
    Laminar { r: usize },
    /// `x1y`, `x` without 1, `y` without 1 and 2.
    Basic,
    /// Restricted to {1,2,3}: `x1y` with `x`, `y` free of 1 and `y` not
    /// ending in 2.
    Generation,
    /// `a1b`, `a` without 1, `b` without symbols `<= q`.
    Forbidden { q: usize },
}

impl Language {
    pub fn name(&self) -> &'static str {
        match self {
            Language::Uniform { .. } => "uniform",
            Language::Laminar { .. } => "laminar",
            Language::Basic => "basic",
            Language::Generation => "generation",
            Language::Forbidden { .. } => "forbidden",
        }
    }

    /// Parses `uniform`, `laminar`, `basic`, `generation` or `forbidden`;
    /// `r` and `q` fill the parameters.
    pub fn parse(s: &str, r: usize, q: usize) -> Result<Self> {
        Ok(match s {
            "uniform" => Language::Uniform { r },
            "laminar" => Language::Laminar { r },
            "basic" => Language::Basic,
            "generation" => Language::Generation,
            "forbidden" => Language::Forbidden { q },
            _ => return invalid(format!("unknown language \"{s}\"")),
        })
    }

    fn alphabet(&self) -> Option<usize> {
        match self {
            Language::Uniform { r } | Language::Laminar { r } => Some(*r),
            _ => None,
        }
    }
}

/// Membership test in one left-to-right pass. Symbols start at 1.
pub fn in_language(word: &[u32], lang: Language) -> Result<bool> {
    let max = lang.alphabet().unwrap_or(u32::MAX as usize);
    if let Some(&s) = word.iter().find(|&&s| s == 0 || s as usize > max) {
        return Err(Error::InvalidInput(format!(
            "symbol {s} outside 1..={max} for the {} language",
            lang.name()
        )));
    }
    let first_one = word.iter().position(|&s| s == 1);
    let Some(i) = first_one else {
        return Ok(false);
    };
    let y = &word[i + 1..];
    Ok(match lang {
        Language::Uniform { r } => y.len() < r,
        Language::Laminar { .. } => well_indexed_suffix(y),
        Language::Basic => y.iter().all(|&s| s > 2),
        Language::Generation => {
            let mut last = None;
            for s in y.iter().copied().filter(|&s| s <= 3) {
                if s == 1 {
                    return Ok(false);
                }
                last = Some(s);
            }
            last != Some(2)
        }
        Language::Forbidden { q } => y.iter().all(|&s| s as usize > q),
    })
}

/// Condition on `y`: no 1, and at most `c - 1` symbols `<= c` for every
/// `c` in `1..=|y|`.
pub fn well_indexed_suffix(y: &[u32]) -> bool {
    let m = y.len();
    let mut hist = vec![0usize; m + 1];
    for &s in y {
        if s == 1 {
            return false;
        }
        if (s as usize) <= m {
            hist[s as usize] += 1;
        }
    }
    let mut below = 0;
    for (c, &h) in hist.iter().enumerate().skip(1) {
        below += h;
        if below > c - 1 {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Vec<u32> {
        s.bytes().map(|b| (b - b'0') as u32).collect()
    }

    #[test]
    fn laminar_examples() {
        let l = Language::Laminar { r: 3 };
        assert!(in_language(&w("1"), l).unwrap());
        assert!(!in_language(&w("122"), l).unwrap());
        assert!(in_language(&w("2313"), l).unwrap());
        assert!(!in_language(&w("11"), l).unwrap());
    }

    #[test]
    fn uniform_examples() {
        let u = Language::Uniform { r: 2 };
        assert!(!in_language(&w("122"), u).unwrap());
        assert!(in_language(&w("2212"), u).unwrap());
        assert!(!in_language(&w("22"), u).unwrap());
    }

    #[test]
    fn generation_examples() {
        assert!(!in_language(&w("3212"), Language::Generation).unwrap());
        assert!(in_language(&w("213"), Language::Generation).unwrap());
        assert!(!in_language(&w("2142"), Language::Generation).unwrap());
        assert!(!in_language(&w("21424"), Language::Generation).unwrap());
        assert!(in_language(&w("2134"), Language::Generation).unwrap());
    }

    #[test]
    fn basic_and_forbidden() {
        assert!(in_language(&w("2213"), Language::Basic).unwrap());
        assert!(!in_language(&w("2132"), Language::Basic).unwrap());
        assert!(in_language(&w("2134"), Language::Forbidden { q: 2 }).unwrap());
        assert!(!in_language(&w("2134"), Language::Forbidden { q: 3 }).unwrap());
    }

    #[test]
    fn bad_symbols_are_rejected() {
        assert!(in_language(&[0], Language::Basic).is_err());
        assert!(in_language(&[4], Language::Laminar { r: 3 }).is_err());
    }
}
