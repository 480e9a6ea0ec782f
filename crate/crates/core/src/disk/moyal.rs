use crate::error::Result;
use crate::jets::SmoothMap;
use crate::matrix::C64;
use crate::series::SeriesProduct;

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// The ν^j coefficient of the Moyal product for `ω = dx∧dy`:
///
/// `C_j(f,g) = (1/j!)(i/2)^j Σ_l (−1)^l C(j,l) (∂_x^l ∂_y^{j−l} f)(∂_x^{j−l} ∂_y^l g)`
pub fn moyal_coefficient(f: &SmoothMap, g: &SmoothMap, j: usize) -> Result<SmoothMap> {
    if j == 0 {
        return SmoothMap::product(f, g);
    }
    let fact: f64 = (1..=j).map(|i| i as f64).product();
    let pref = C64::new(0.0, 0.5).powu(j as u32) / fact;
    let mut terms = Vec::with_capacity(j + 1);
    for l in 0..=j {
        let df = f.partial(l, j - l);
        let dg = g.partial(j - l, l);
        let p = SmoothMap::product(&df, &dg)?;
        if p.is_zero() {
            continue;
        }
        let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
        terms.push(p.scale(pref * sign * binomial(j, l)));
    }
    if terms.is_empty() {
        return Ok(SmoothMap::zero(f.dim().max(g.dim())));
    }
    SmoothMap::sum(terms)
}

/// Moyal product on series coefficients, for use with `series_mul`.
#[derive(Clone, Copy, Debug)]
pub struct MoyalProduct {
    pub max_order: usize,
}

impl SeriesProduct<SmoothMap> for MoyalProduct {
    fn max_shift(&self) -> usize {
        self.max_order
    }

    fn apply(&self, a: &SmoothMap, b: &SmoothMap, shift: usize) -> Result<Option<SmoothMap>> {
        let c = moyal_coefficient(a, b, shift)?;
        Ok((!c.is_zero()).then_some(c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::jet_eval;
    use crate::matrix::MatrixNC;

    #[test]
    fn first_coefficient_of_x_and_y() {
        let c = moyal_coefficient(&SmoothMap::x(), &SmoothMap::y(), 1).unwrap();
        let v = jet_eval(&c, [0.2, -0.1], 0).unwrap().value()[(0, 0)];
        assert!((v - C64::new(0.0, -0.5)).norm() < 1e-15);
    }

    #[test]
    fn constants_have_no_corrections() {
        let a = SmoothMap::constant(MatrixNC::pauli()[1].clone());
        let g = &SmoothMap::x() * &SmoothMap::y();
        for j in 1..4 {
            assert!(moyal_coefficient(&a, &g, j).unwrap().is_zero());
        }
    }

    #[test]
    fn poisson_bracket_is_antisymmetric() {
        let (x, y) = (SmoothMap::x(), SmoothMap::y());
        let f = &(&x * &x) * &y;
        let g = SmoothMap::compose(crate::jets::Primitive::Sin, &(&x + &y)).unwrap();
        let s = &moyal_coefficient(&f, &g, 1).unwrap() + &moyal_coefficient(&g, &f, 1).unwrap();
        let v = jet_eval(&s, [0.3, 0.4], 0).unwrap();
        assert!(v.max_abs() < 1e-15);
    }
}
