use std::ops::{Add, Sub};

/// In-place unnormalized fast Walsh-Hadamard transform.
///
/// The length must be a power of two. Uses the Sylvester ordering, so the
/// result equals `H x` with `H[i][j] = (-1)^popcount(i & j)`.
pub fn fwht<T>(x: &mut [T])
where
    T: Copy + Add<Output = T> + Sub<Output = T>,
{
    let n = x.len();
    assert!(n.is_power_of_two() || n == 0, "fwht length {n} is not a power of two");
    let mut h = 1;
    while h < n {
        for start in (0..n).step_by(2 * h) {
            for i in start..start + h {
                let a = x[i];
                let b = x[i + h];
                x[i] = a + b;
                x[i + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// Entry `(i, j)` of the Sylvester Hadamard matrix.
pub fn hadamard_entry(i: usize, j: usize) -> f64 {
    if (i & j).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}
