use crate::error::{Error, Result};

use super::combination::Combination;

/// `+1` for an even number of inversions, `-1` otherwise.
pub fn permutation_parity(seq: &[usize]) -> i8 {
    let inversions = (0..seq.len())
        .flat_map(|a| (a + 1..seq.len()).map(move |b| (a, b)))
        .filter(|&(a, b)| seq[a] > seq[b])
        .count();
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `ε(I, c, J)`: parity of the sequence `(I, c, J)` read against `1, …, n`.
pub fn signature_one(i_set: &Combination, c: usize, j_set: &Combination) -> Result<i8> {
    let n = i_set.n();
    if j_set.n() != n {
        return Err(Error::InvalidArgument(format!(
            "ambient sizes differ: {n} and {}",
            j_set.n()
        )));
    }
    let partition = c >= 1
        && c <= n
        && !i_set.contains(c)
        && !j_set.contains(c)
        && i_set.is_disjoint(j_set)
        && i_set.len() + j_set.len() + 1 == n;
    if !partition {
        return Err(Error::InvalidArgument(format!(
            "{i_set}, {{{c}}}, {j_set} do not partition 1..={n}"
        )));
    }
    let mut seq = i_set.members().to_vec();
    seq.push(c);
    seq.extend_from_slice(j_set.members());
    Ok(permutation_parity(&seq))
}
