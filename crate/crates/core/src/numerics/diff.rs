//! Central finite differences with Richardson extrapolation.

use crate::real::{LinearValue, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeOrder {
    First,
    Second,
}

/// Derivative estimate with an error bound taken from the extrapolation table.
#[derive(Debug, Clone, Copy)]
pub struct Derivative<V, T> {
    pub value: V,
    pub error: T,
}

const LEVELS: usize = 8;

fn central<T: Real, V: LinearValue<T>, F: FnMut(T) -> V>(
    f: &mut F,
    x: T,
    h: T,
    order: DerivativeOrder,
) -> V {
    match order {
        DerivativeOrder::First => (f(x + h) - f(x - h)).scale(T::one() / (h + h)),
        DerivativeOrder::Second => {
            let c = f(x);
            (f(x + h) + f(x - h) - c - c).scale(T::one() / (h * h))
        }
    }
}

/// Derivative of `f` at `x` starting from step `h` (Ridders' scheme: the step
/// is halved each level and the table is extrapolated in `h²`; the estimate
/// with the smallest error indicator is returned).
pub fn fd_derivative<T, V, F>(mut f: F, x: T, order: DerivativeOrder, h: T) -> Derivative<V, T>
where
    T: Real,
    V: LinearValue<T>,
    F: FnMut(T) -> V,
{
    let shrink = T::lit(2.0);
    let mut table: Vec<Vec<V>> = Vec::with_capacity(LEVELS);
    let mut step = h;
    let mut best = Derivative {
        value: central(&mut f, x, step, order),
        error: T::max_value(),
    };
    table.push(vec![best.value]);

    for level in 1..LEVELS {
        step /= shrink;
        let mut row = Vec::with_capacity(level + 1);
        row.push(central(&mut f, x, step, order));
        let mut factor = T::one();
        for j in 1..=level {
            factor = factor * shrink * shrink;
            let prev_same = row[j - 1];
            let prev_coarse = table[level - 1][j - 1];
            let extrap =
                prev_same + (prev_same - prev_coarse).scale(T::one() / (factor - T::one()));
            let err = (extrap - prev_same)
                .magnitude()
                .max((extrap - prev_coarse).magnitude());
            if err <= best.error {
                best = Derivative {
                    value: extrap,
                    error: err,
                };
            }
            row.push(extrap);
        }
        let diverging =
            (row[level] - table[level - 1][level - 1]).magnitude() >= best.error * T::lit(2.0);
        table.push(row);
        if diverging {
            break;
        }
    }
    best
}
