use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{HypothesisClass, SuccessPattern, SuccessVector, PATTERN_LEN};
use crate::error::{Error, Result};

/// A stream of evaluated examples.
pub trait ExampleSource {
    /// Number of hypotheses each vector covers.
    fn n(&self) -> usize;

    /// The next example, or `None` once a finite source is exhausted.
    fn next_vector(&mut self) -> Option<&SuccessVector>;

    /// Caps the stream at `max` examples.
    fn limit(self, max: u64) -> Limited<Self>
    where
        Self: Sized,
    {
        Limited {
            inner: self,
            remaining: max,
        }
    }
}

impl<S: ExampleSource + ?Sized> ExampleSource for &mut S {
    fn n(&self) -> usize {
        (**self).n()
    }

    fn next_vector(&mut self) -> Option<&SuccessVector> {
        (**self).next_vector()
    }
}

/// Unbounded source driven by per-hypothesis success patterns.
///
/// Every round draws a single index into the patterns; all hypotheses are
/// judged on that same index.
#[derive(Debug, Clone)]
pub struct PatternSource {
    n: usize,
    // columns[i] holds bit i of every pattern
    columns: Vec<SuccessVector>,
    rng: ChaCha8Rng,
}

impl PatternSource {
    pub fn new(patterns: &[SuccessPattern], rng: ChaCha8Rng) -> Result<Self> {
        if patterns.is_empty() {
            return Err(Error::param(
                "n",
                "pattern source needs at least one pattern",
            ));
        }
        for p in patterns {
            if p.len() != PATTERN_LEN {
                return Err(Error::LengthMismatch {
                    expected: PATTERN_LEN,
                    got: p.len(),
                });
            }
        }
        let columns = (0..PATTERN_LEN)
            .map(|i| SuccessVector::new(patterns.iter().map(|p| p.bits()[i]).collect()))
            .collect();
        Ok(PatternSource {
            n: patterns.len(),
            columns,
            rng,
        })
    }

    /// Checks the pattern count against the class before building the source.
    pub fn for_class(
        class: &HypothesisClass,
        patterns: &[SuccessPattern],
        rng: ChaCha8Rng,
    ) -> Result<Self> {
        if patterns.len() != class.n() {
            return Err(Error::LengthMismatch {
                expected: class.n(),
                got: patterns.len(),
            });
        }
        Self::new(patterns, rng)
    }
}

impl ExampleSource for PatternSource {
    fn n(&self) -> usize {
        self.n
    }

    fn next_vector(&mut self) -> Option<&SuccessVector> {
        let i = self.rng.gen_range(0..PATTERN_LEN);
        Some(&self.columns[i])
    }
}

/// Finite source replaying recorded rows in order.
#[derive(Debug, Clone)]
pub struct MatrixSource {
    n: usize,
    rows: Vec<SuccessVector>,
    cursor: usize,
}

impl MatrixSource {
    /// `n` is the expected row width; it is needed because an empty matrix
    /// still has a hypothesis count.
    pub fn new(n: usize, rows: Vec<SuccessVector>) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("n", "matrix needs at least one column"));
        }
        for row in &rows {
            if row.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
        }
        Ok(MatrixSource { n, rows, cursor: 0 })
    }

    pub fn rows(&self) -> &[SuccessVector] {
        &self.rows
    }

    pub fn remaining(&self) -> usize {
        self.rows.len() - self.cursor
    }
}

impl ExampleSource for MatrixSource {
    fn n(&self) -> usize {
        self.n
    }

    fn next_vector(&mut self) -> Option<&SuccessVector> {
        let row = self.rows.get(self.cursor)?;
        self.cursor += 1;
        Some(row)
    }
}

/// See [`ExampleSource::limit`].
#[derive(Debug, Clone)]
pub struct Limited<S> {
    inner: S,
    remaining: u64,
}

impl<S: ExampleSource> ExampleSource for Limited<S> {
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn next_vector(&mut self) -> Option<&SuccessVector> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        self.inner.next_vector()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypotheses::{make_pattern, realize_class, symmetric_class};
    use rand::SeedableRng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn all_ones_patterns() {
        let ones = SuccessPattern::from_bits(vec![true; PATTERN_LEN]);
        let mut src = PatternSource::new(&[ones.clone(), ones.clone(), ones], rng(0)).unwrap();
        for _ in 0..200 {
            assert_eq!(src.next_vector().unwrap().successes(), 3);
        }
    }

    #[test]
    fn complementary_patterns() {
        let p = make_pattern(0.3, &mut rng(5));
        let q = SuccessPattern::from_bits(p.bits().iter().map(|b| !b).collect());
        let mut src = PatternSource::new(&[p, q], rng(6)).unwrap();
        for _ in 0..500 {
            assert_eq!(src.next_vector().unwrap().successes(), 1);
        }
    }

    #[test]
    fn marginal_frequencies() {
        let class = symmetric_class(0.2).unwrap();
        let mut r = rng(11);
        let (effective, patterns) = realize_class(&class, &mut r).unwrap();
        let mut src = PatternSource::for_class(&effective, &patterns, r).unwrap();
        let rounds = 100_000;
        let mut counts = vec![0u64; effective.n()];
        for _ in 0..rounds {
            let v = src.next_vector().unwrap();
            for (h, c) in counts.iter_mut().enumerate() {
                *c += v.get(h) as u64;
            }
        }
        for (h, c) in counts.iter().enumerate() {
            let freq = *c as f64 / rounds as f64;
            let target = effective.hypotheses()[h].accuracy;
            assert!((freq - target).abs() < 0.01, "h{h}: {freq} vs {target}");
        }
    }

    #[test]
    fn pattern_source_is_reproducible() {
        let class = symmetric_class(0.1).unwrap();
        let run = |seed| {
            let mut r = rng(seed);
            let (_, patterns) = realize_class(&class, &mut r).unwrap();
            let mut src = PatternSource::new(&patterns, r).unwrap();
            (0..50)
                .map(|_| src.next_vector().unwrap().clone())
                .collect::<Vec<_>>()
        };
        assert_eq!(run(42), run(42));
        assert_ne!(run(42), run(43));
    }

    #[test]
    fn pattern_count_must_match_class() {
        let class = symmetric_class(0.1).unwrap();
        let p = make_pattern(0.5, &mut rng(0));
        assert!(PatternSource::for_class(&class, &[p], rng(0)).is_err());
    }

    #[test]
    fn matrix_exhausts() {
        let rows = vec![
            SuccessVector::new(vec![true, false]),
            SuccessVector::new(vec![false, false]),
            SuccessVector::new(vec![true, true]),
        ];
        let mut src = MatrixSource::new(2, rows.clone()).unwrap();
        for row in &rows {
            assert_eq!(src.next_vector(), Some(row));
        }
        assert_eq!(src.next_vector(), None);
        assert_eq!(src.next_vector(), None);

        let mut empty = MatrixSource::new(3, vec![]).unwrap();
        assert_eq!(empty.next_vector(), None);
    }

    #[test]
    fn matrix_rejects_ragged_rows() {
        let rows = vec![
            SuccessVector::new(vec![true]),
            SuccessVector::new(vec![true, false]),
        ];
        assert!(MatrixSource::new(1, rows).is_err());
    }

    #[test]
    fn limited_stops() {
        let ones = SuccessPattern::from_bits(vec![true; PATTERN_LEN]);
        let mut src = PatternSource::new(&[ones], rng(0)).unwrap().limit(3);
        assert!(src.next_vector().is_some());
        assert!(src.next_vector().is_some());
        assert!(src.next_vector().is_some());
        assert!(src.next_vector().is_none());
    }
}
