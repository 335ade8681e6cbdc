//! Closed-form newform counts per level, weight and sign class.
//!
//! Levels 1, 3, 4 and 9 are periodic in the weight mod 12, levels 2 and 6
//! mod 24, with iota = min(1, n) correcting the first period. Level 8 has
//! the closed form #P_k(8) = (k-1)/4 + (-1)^{k/2}/4. For level 9 the counts
//! cover the genuinely-new part P^0 only; the twisted part is counted by the
//! level 1 and level 3 columns.

use crate::error::{Error, Result};
use crate::hecke::ClassLabel;

/// One (level, weight, class) cell of the counting tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassCount {
    pub level: u32,
    pub weight: u32,
    pub class: ClassLabel,
    pub count: usize,
}

fn check_weight(k: u32) -> Result<()> {
    if k < 2 || k % 2 != 0 {
        return Err(Error::domain(format!("weight {k} must be even and >= 2")));
    }
    Ok(())
}

/// Split k = r + period * n with r in {2, 4, .., period}.
fn split(k: u32, period: u32) -> (u32, i64) {
    let r = (k - 2) % period + 2;
    (r, ((k - r) / period) as i64)
}

fn iota(n: i64) -> i64 {
    n.min(1)
}

fn table_count(level: u32, class: u32, k: u32) -> Result<i64> {
    let (r, n) = split(k, if level == 2 || level == 6 { 24 } else { 12 });
    let i = iota(n);
    let v = match (level, class, r) {
        (1, 1, 2) => n - i,
        (1, 1, 12) => 1 + n,
        (1, 1, _) => n,

        (3, 1, 2) => i + n,
        (3, 1, 6) | (3, 1, 10) => 1 + n,
        (3, 1, _) => n,
        (3, 3, 8) | (3, 3, 10) | (3, 3, 12) => 1 + n,
        (3, 3, _) => n,

        (4, 1, 6) | (4, 1, 10) | (4, 1, 12) => 1 + n,
        (4, 1, _) => n,

        (2, 1, 2) => i + n,
        (2, 1, 10) | (2, 1, 14) | (2, 1, 18) | (2, 1, 20) | (2, 1, 22) => 1 + n,
        (2, 1, _) => n,
        (2, 2, 8) | (2, 2, 14) | (2, 2, 16) | (2, 2, 20) | (2, 2, 22) | (2, 2, 24) => 1 + n,
        (2, 2, _) => n,

        (6, 1, 2) => n - i,
        (6, 1, 8) | (6, 1, 12) | (6, 1, 16) | (6, 1, 20) | (6, 1, 22) => 1 + n,
        (6, 1, 24) => 2 + n,
        (6, 1, _) => n,
        (6, 2, 10) | (6, 2, 12) | (6, 2, 18) | (6, 2, 20) | (6, 2, 22) | (6, 2, 24) => 1 + n,
        (6, 2, _) => n,
        (6, 3, 6) | (6, 3, 14) | (6, 3, 16) | (6, 3, 18) | (6, 3, 22) | (6, 3, 24) => 1 + n,
        (6, 3, _) => n,
        (6, 6, 4) | (6, 6, 12) | (6, 6, 16) | (6, 6, 18) | (6, 6, 20) | (6, 6, 24) => 1 + n,
        (6, 6, _) => n,

        (9, 1, 2) | (9, 1, 6) => 2 * n,
        (9, 1, 4) | (9, 1, 10) => 1 + 2 * n,
        (9, 1, 8) | (9, 1, 12) => 2 + 2 * n,

        _ => return Err(Error::domain(format!("no table row for level {level} class {class}"))),
    };
    Ok(v)
}

/// #P_k(N; i) from the closed-form tables. For N = 9 the argument i = 1 is
/// accepted and the count is that of the genuinely-new part P^0_k(9).
pub fn predicted_count(level: u32, weight: u32, class: u32) -> Result<usize> {
    check_weight(weight)?;
    let v = match level {
        1 | 3 | 4 | 2 | 6 | 9 => {
            let valid: &[u32] = match level {
                1 | 4 | 9 => &[1],
                2 => &[1, 2],
                3 => &[1, 3],
                6 => &[1, 2, 3, 6],
                _ => unreachable!(),
            };
            if !valid.contains(&class) {
                return Err(Error::domain(format!(
                    "class {class} is not a divisor class of level {level}"
                )));
            }
            table_count(level, class, weight)?
        }
        8 => {
            if class != 1 {
                return Err(Error::domain("level 8 has a single class".into()));
            }
            let k = weight as i64;
            let sign = if weight % 4 == 0 { 1 } else { -1 };
            (k - 1 + sign) / 4
        }
        _ => return Err(Error::domain(format!("unsupported level {level}"))),
    };
    if v < 0 {
        return Err(Error::internal(format!(
            "table produced a negative count at ({level}, {weight}, {class})"
        )));
    }
    Ok(v as usize)
}

/// Count for a `ClassLabel`, including the level-9 partition. The `Zero`
/// part consists of the forms supported on q * C[[q^3]]; its count follows
/// the pattern of the displayed lists (one form exactly when k = 4 mod 6),
/// and `Star` is the rest of P^0.
pub fn predicted_count_class(level: u32, weight: u32, class: ClassLabel) -> Result<usize> {
    match class {
        ClassLabel::Sign(i) => predicted_count(level, weight, i),
        ClassLabel::Zero | ClassLabel::Star => {
            if level != 9 {
                return Err(Error::domain("partition labels apply to level 9 only"));
            }
            let p0 = predicted_count(9, weight, 1)?;
            let zero = if weight % 6 == 4 { 1 } else { 0 };
            Ok(match class {
                ClassLabel::Zero => zero,
                _ => p0 - zero,
            })
        }
        ClassLabel::Twist => {
            if level != 9 {
                return Err(Error::domain("partition labels apply to level 9 only"));
            }
            Ok(predicted_total(1, weight)? + predicted_total(3, weight)?)
        }
    }
}

/// #P_k(N) summed over classes; for N = 9 this includes the twists.
pub fn predicted_total(level: u32, weight: u32) -> Result<usize> {
    Ok(match level {
        1 | 4 => predicted_count(level, weight, 1)?,
        8 => predicted_count(8, weight, 1)?,
        2 => predicted_count(2, weight, 1)? + predicted_count(2, weight, 2)?,
        3 => predicted_count(3, weight, 1)? + predicted_count(3, weight, 3)?,
        6 => [1u32, 2, 3, 6]
            .iter()
            .map(|&i| predicted_count(6, weight, i))
            .sum::<Result<usize>>()?,
        9 => {
            predicted_count(9, weight, 1)?
                + predicted_total(1, weight)?
                + predicted_total(3, weight)?
        }
        _ => return Err(Error::domain(format!("unsupported level {level}"))),
    })
}

/// All class labels of a level, in deterministic order.
pub fn class_labels(level: u32) -> Vec<ClassLabel> {
    match level {
        1 | 4 | 8 => vec![ClassLabel::Sign(1)],
        2 => vec![ClassLabel::Sign(1), ClassLabel::Sign(2)],
        3 => vec![ClassLabel::Sign(1), ClassLabel::Sign(3)],
        6 => vec![
            ClassLabel::Sign(1),
            ClassLabel::Sign(2),
            ClassLabel::Sign(3),
            ClassLabel::Sign(6),
        ],
        9 => vec![ClassLabel::Zero, ClassLabel::Star, ClassLabel::Twist],
        _ => vec![],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_examples() {
        assert_eq!(predicted_count(1, 12, 1).unwrap(), 1);
        assert_eq!(predicted_count(8, 18, 1).unwrap(), 4);
        assert_eq!(predicted_count(1, 14, 1).unwrap(), 0);
    }

    #[test]
    fn theorem1_cells_are_singletons() {
        assert_eq!(predicted_count(1, 12, 1).unwrap(), 1);
        assert_eq!(predicted_count(2, 8, 2).unwrap(), 1);
        assert_eq!(predicted_count(3, 6, 1).unwrap(), 1);
        assert_eq!(predicted_count(4, 6, 1).unwrap(), 1);
        assert_eq!(predicted_count(6, 4, 6).unwrap(), 1);
        assert_eq!(predicted_count(8, 4, 1).unwrap(), 1);
        assert_eq!(predicted_count_class(9, 4, ClassLabel::Zero).unwrap(), 1);
    }

    #[test]
    fn low_weight_vanishing() {
        for k in [2u32, 4, 6, 8, 10] {
            assert_eq!(predicted_count(1, k, 1).unwrap(), 0, "no cusp forms of weight {k} at level 1");
        }
        assert_eq!(predicted_count(2, 12, 1).unwrap(), 0);
        assert_eq!(predicted_count(2, 12, 2).unwrap(), 0);
    }

    #[test]
    fn level6_weight24_class1() {
        assert_eq!(predicted_count(6, 24, 1).unwrap(), 2);
    }

    #[test]
    fn level9_partition() {
        assert_eq!(predicted_count(9, 8, 1).unwrap(), 2);
        assert_eq!(predicted_count_class(9, 8, ClassLabel::Star).unwrap(), 2);
        assert_eq!(predicted_count_class(9, 8, ClassLabel::Zero).unwrap(), 0);
        assert_eq!(predicted_count_class(9, 16, ClassLabel::Zero).unwrap(), 1);
        assert_eq!(predicted_count_class(9, 20, ClassLabel::Star).unwrap(), 4);
        assert_eq!(predicted_count_class(9, 8, ClassLabel::Twist).unwrap(), 1);
    }

    #[test]
    fn invalid_inputs_rejected() {
        assert!(predicted_count(5, 12, 1).is_err());
        assert!(predicted_count(1, 13, 1).is_err());
        assert!(predicted_count(2, 12, 3).is_err());
    }
}
