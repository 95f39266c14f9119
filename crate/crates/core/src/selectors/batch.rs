use super::{argmax, check_len, SelectionResult, StopReason};
use crate::error::{Error, Result};
use crate::hypotheses::ExampleSource;

/// Draws `m` examples and picks the hypothesis correct on most of them.
pub fn bs_run<S: ExampleSource + ?Sized>(source: &mut S, m: u64) -> Result<SelectionResult> {
    if m == 0 {
        return Err(Error::param("m", "batch size must be at least 1"));
    }
    let n = source.n();
    let mut counts = vec![0u64; n];
    let mut steps = 0;
    while steps < m {
        let Some(v) = source.next_vector() else { break };
        check_len(n, v)?;
        for (c, &b) in counts.iter_mut().zip(v.bits()) {
            *c += b as u64;
        }
        steps += 1;
    }
    Ok(SelectionResult {
        chosen: argmax(&counts),
        steps,
        final_eps: None,
        final_weights: None,
        stop_reason: if steps == m {
            StopReason::Threshold
        } else {
            StopReason::Exhausted
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypotheses::{MatrixSource, SuccessVector};

    fn matrix(rows: &[&[u8]]) -> MatrixSource {
        let n = rows[0].len();
        MatrixSource::new(
            n,
            rows.iter()
                .map(|r| SuccessVector::new(r.iter().map(|&b| b == 1).collect()))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn single_example() {
        let r = bs_run(&mut matrix(&[&[1, 0, 0]]), 1).unwrap();
        assert_eq!(
            (r.chosen, r.steps, r.stop_reason),
            (0, 1, StopReason::Threshold)
        );
    }

    #[test]
    fn ties_go_to_lowest_id() {
        let r = bs_run(&mut matrix(&[&[1, 1, 1], &[0, 0, 0]]), 2).unwrap();
        assert_eq!(r.chosen, 0);
    }

    #[test]
    fn consumes_exactly_m() {
        let mut src = matrix(&[&[0, 1], &[0, 1], &[1, 0], &[1, 0], &[1, 0]]);
        let r = bs_run(&mut src, 2).unwrap();
        assert_eq!((r.chosen, r.steps), (1, 2));
        assert_eq!(src.remaining(), 3);
    }

    #[test]
    fn exhausted_source() {
        let r = bs_run(&mut matrix(&[&[0, 1], &[0, 1]]), 10).unwrap();
        assert_eq!(
            (r.chosen, r.steps, r.stop_reason),
            (1, 2, StopReason::Exhausted)
        );
    }

    #[test]
    fn zero_batch_rejected() {
        assert!(bs_run(&mut matrix(&[&[1]]), 0).is_err());
    }
}
