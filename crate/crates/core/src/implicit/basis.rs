use super::poly::Monomial;

/// All monomials of degree `0..=max_degree` in `n_vars` variables, graded-lex ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialBasis {
    n_vars: usize,
    max_degree: u32,
    // each monomial as a non-decreasing list of variable indices
    factors: Vec<Vec<usize>>,
}

impl MonomialBasis {
    pub fn new(n_vars: usize, max_degree: u32) -> Self {
        let mut factors = vec![Vec::new()];
        for d in 1..=max_degree as usize {
            let mut cur = Vec::with_capacity(d);
            push_sequences(n_vars, d, 0, &mut cur, &mut factors);
        }
        MonomialBasis {
            n_vars,
            max_degree,
            factors,
        }
    }

    /// `C(n_vars + max_degree, max_degree)` without building the basis.
    pub fn size_for(n_vars: usize, max_degree: u32) -> usize {
        let (n, d) = (n_vars as u128, max_degree as u128);
        let mut c: u128 = 1;
        for i in 1..=d {
            c = c * (n + i) / i;
        }
        c as usize
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn monomial(&self, k: usize) -> Monomial {
        let pairs: Vec<(usize, u32)> = self.factors[k].iter().map(|&v| (v, 1)).collect();
        Monomial::from_pairs(&pairs)
    }

    pub fn monomials(&self) -> Vec<Monomial> {
        (0..self.len()).map(|k| self.monomial(k)).collect()
    }

    pub fn exponents(&self) -> Vec<Vec<u32>> {
        self.monomials().iter().map(|m| m.to_dense(self.n_vars)).collect()
    }

    pub fn degree_of(&self, k: usize) -> u32 {
        self.factors[k].len() as u32
    }

    /// Values of every basis monomial at `point`.
    pub fn eval_row(&self, point: &[f64]) -> Vec<f64> {
        self.factors
            .iter()
            .map(|f| f.iter().map(|&v| point[v]).product())
            .collect()
    }
}

fn push_sequences(n: usize, left: usize, from: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if left == 0 {
        out.push(cur.clone());
        return;
    }
    for v in from..n {
        cur.push(v);
        push_sequences(n, left - 1, v, cur, out);
        cur.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_match_binomials() {
        for (n, d) in [(1, 3), (2, 2), (5, 3), (27, 2), (36, 1)] {
            let b = MonomialBasis::new(n, d);
            assert_eq!(b.len(), MonomialBasis::size_for(n, d));
        }
        assert_eq!(MonomialBasis::size_for(27, 2), 406);
    }

    #[test]
    fn order_is_graded_lex() {
        let b = MonomialBasis::new(3, 3);
        let ms = b.monomials();
        assert!(ms.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(b.exponents()[..5], [vec![0, 0, 0], vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![2, 0, 0]]);
    }

    #[test]
    fn evaluates_rows() {
        let b = MonomialBasis::new(2, 2);
        assert_eq!(b.eval_row(&[2.0, 3.0]), vec![1.0, 2.0, 3.0, 4.0, 6.0, 9.0]);
    }
}
