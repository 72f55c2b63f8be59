use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Sliding window over the most recent input samples.
///
/// Holds `taps + order - 1` samples so that the `order` regressor columns
/// `x(k), x(k-1), ..., x(k-order+1)` can be borrowed as contiguous slices.
/// Column `j` is the tap window as it was `j` pushes ago; index 0 of every
/// column is its newest sample. Samples that were never pushed read as zero.
///
/// Storage is a mirrored ring: every sample is written twice, `capacity`
/// apart, so any `capacity`-long run starting at the head is contiguous.
#[derive(Debug, Clone)]
pub struct RegressorBuffer<T> {
    taps: usize,
    order: usize,
    capacity: usize,
    data: Vec<T>,
    head: usize,
    pushed: u64,
}

impl<T: Scalar> RegressorBuffer<T> {
    pub fn new(taps: usize, order: usize) -> Result<Self> {
        if taps == 0 {
            return Err(Error::InvalidParameter(
                "filter length must be at least 1".into(),
            ));
        }
        if order == 0 {
            return Err(Error::InvalidParameter(
                "projection order must be at least 1".into(),
            ));
        }
        let capacity = taps + order - 1;
        Ok(Self {
            taps,
            order,
            capacity,
            data: vec![T::zero(); 2 * capacity],
            head: 0,
            pushed: 0,
        })
    }

    pub fn push(&mut self, x: T) -> Result<()> {
        if !x.is_finite() {
            return Err(Error::NonFinite("input sample"));
        }
        self.head = if self.head == 0 {
            self.capacity - 1
        } else {
            self.head - 1
        };
        self.data[self.head] = x;
        self.data[self.head + self.capacity] = x;
        self.pushed += 1;
        Ok(())
    }

    /// Current tap window `x(k)..x(k-L+1)`, newest first.
    #[inline]
    pub fn window(&self) -> &[T] {
        self.column(0)
    }

    /// Column `j` of the regressor matrix, i.e. `x(k-j)`.
    ///
    /// # Panics
    ///
    /// If `j >= order`.
    #[inline]
    pub fn column(&self, j: usize) -> &[T] {
        assert!(
            j < self.order,
            "column {j} out of range for order {}",
            self.order
        );
        let start = self.head + j;
        &self.data[start..start + self.taps]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[T]> + '_ {
        (0..self.order).map(move |j| self.column(j))
    }

    /// Every retained sample, newest first (`taps + order - 1` entries).
    pub fn history(&self) -> &[T] {
        &self.data[self.head..self.head + self.capacity]
    }

    #[inline]
    pub fn taps(&self) -> usize {
        self.taps
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn samples_pushed(&self) -> u64 {
        self.pushed
    }

    pub fn clear(&mut self) {
        self.data.iter_mut().for_each(|v| *v = T::zero());
        self.head = 0;
        self.pushed = 0;
    }
}
