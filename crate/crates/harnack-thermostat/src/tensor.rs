//! Dense coordinate tensors with all indices in the same dimension.

use crate::jet::Jet;

#[derive(Clone, Debug, PartialEq)]
pub struct Tensor<T = f64> {
    dim: usize,
    rank: usize,
    data: Vec<T>,
}

pub type JetTensor = Tensor<Jet>;

/// Unflatten a row-major index.
pub fn multi_index(mut flat: usize, dim: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = flat % dim;
        flat /= dim;
    }
}

impl<T: Clone> Tensor<T> {
    pub fn from_fn(dim: usize, rank: usize, mut f: impl FnMut(&[usize]) -> T) -> Self {
        let len = dim.pow(rank as u32);
        let mut idx = vec![0; rank];
        let data = (0..len)
            .map(|flat| {
                multi_index(flat, dim, &mut idx);
                f(&idx)
            })
            .collect();
        Tensor { dim, rank, data }
    }

    pub fn try_from_fn<E>(dim: usize, rank: usize, mut f: impl FnMut(&[usize]) -> Result<T, E>) -> Result<Self, E> {
        let len = dim.pow(rank as u32);
        let mut idx = vec![0; rank];
        let mut data = Vec::with_capacity(len);
        for flat in 0..len {
            multi_index(flat, dim, &mut idx);
            data.push(f(&idx)?);
        }
        Ok(Tensor { dim, rank, data })
    }

    pub fn from_vec(dim: usize, rank: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), dim.pow(rank as u32), "tensor data length");
        Tensor { dim, rank, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn flat(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank);
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn get(&self, idx: &[usize]) -> &T {
        &self.data[self.flat(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: T) {
        let k = self.flat(idx);
        self.data[k] = v;
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Tensor<U> {
        Tensor { dim: self.dim, rank: self.rank, data: self.data.iter().map(f).collect() }
    }
}

impl Tensor<f64> {
    pub fn zeros(dim: usize, rank: usize) -> Self {
        Tensor { dim, rank, data: vec![0.0; dim.pow(rank as u32)] }
    }

    pub fn at(&self, idx: &[usize]) -> f64 {
        self.data[self.flat(idx)]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn max_abs_diff(&self, other: &Tensor) -> f64 {
        assert_eq!((self.dim, self.rank), (other.dim, other.rank));
        self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn scaled(&self, s: f64) -> Tensor {
        self.map(|x| x * s)
    }

    pub fn add(&self, other: &Tensor) -> Tensor {
        Tensor { dim: self.dim, rank: self.rank, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Tensor) -> Tensor {
        self.add(&other.scaled(-1.0))
    }
}

impl Tensor<Jet> {
    pub fn values(&self) -> Tensor {
        self.map(|j| j.value())
    }

    /// Partial derivative of every component along jet variable `var`.
    pub fn partial(&self, var: usize) -> Tensor<Jet> {
        self.map(|j| j.deriv(var))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_major_round_trip() {
        let t = Tensor::from_fn(3, 3, |i| (i[0] * 100 + i[1] * 10 + i[2]) as f64);
        assert_eq!(t.at(&[2, 0, 1]), 201.0);
        let mut idx = [0; 3];
        multi_index(t.flat(&[1, 2, 0]), 3, &mut idx);
        assert_eq!(idx, [1, 2, 0]);
    }
}
