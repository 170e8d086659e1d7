/// An integer `2 x 2` matrix.
pub type Sl2Matrix = [[i64; 2]; 2];

pub const SL2_A: Sl2Matrix = [[1, 1], [0, 1]];
pub const SL2_B: Sl2Matrix = [[1, 0], [-1, 1]];
const IDENTITY: Sl2Matrix = [[1, 0], [0, 1]];

fn mul(a: &Sl2Matrix, b: &Sl2Matrix) -> Sl2Matrix {
    let mut out = [[0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// `(AB)^k`.
pub fn ab_power(k: usize) -> Sl2Matrix {
    let ab = mul(&SL2_A, &SL2_B);
    (0..k).fold(IDENTITY, |acc, _| mul(&acc, &ab))
}

/// Whether `(AB)^{6n}` is the identity.
pub fn sl2_word_check(n: usize) -> bool {
    ab_power(6 * n) == IDENTITY
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn word_identity() {
        assert_eq!(ab_power(1), [[0, 1], [-1, 1]]);
        assert!(sl2_word_check(1) && sl2_word_check(3));
        for k in 1..60 {
            assert_eq!(ab_power(k) == IDENTITY, k % 6 == 0, "k = {k}");
        }
    }
}
