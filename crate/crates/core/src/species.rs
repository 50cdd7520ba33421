//! The two electronic species carried by a photo-active network.

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

/// Per-species pair: index 0 is the trans population, index 1 the cis one.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Pair<T> {
    pub trans: T,
    pub cis: T,
}

impl<T> Pair<T> {
    pub const fn new(trans: T, cis: T) -> Self {
        Pair { trans, cis }
    }

    pub fn get(&self, s: usize) -> &T {
        match s {
            0 => &self.trans,
            1 => &self.cis,
            _ => panic!("species index {s} out of range"),
        }
    }

    pub fn get_mut(&mut self, s: usize) -> &mut T {
        match s {
            0 => &mut self.trans,
            1 => &mut self.cis,
            _ => panic!("species index {s} out of range"),
        }
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Pair<U> {
        Pair { trans: f(&self.trans), cis: f(&self.cis) }
    }

    pub fn zip_with<U, V>(&self, o: &Pair<U>, f: impl Fn(&T, &U) -> V) -> Pair<V> {
        Pair { trans: f(&self.trans, &o.trans), cis: f(&self.cis, &o.cis) }
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        [&self.trans, &self.cis].into_iter()
    }
}

impl<T: Copy> Pair<T> {
    pub const fn splat(v: T) -> Self {
        Pair { trans: v, cis: v }
    }
}

impl<T: Copy + Add<Output = T>> Pair<T> {
    pub fn sum(&self) -> T {
        self.trans + self.cis
    }
}

impl<T: Copy + Add<Output = T>> Add for Pair<T> {
    type Output = Pair<T>;
    fn add(self, o: Pair<T>) -> Pair<T> {
        self.zip_with(&o, |a, b| *a + *b)
    }
}

impl<T: Copy + Sub<Output = T>> Sub for Pair<T> {
    type Output = Pair<T>;
    fn sub(self, o: Pair<T>) -> Pair<T> {
        self.zip_with(&o, |a, b| *a - *b)
    }
}

impl<T: Copy + Mul<f64, Output = T>> Mul<f64> for Pair<T> {
    type Output = Pair<T>;
    fn mul(self, s: f64) -> Pair<T> {
        self.map(|a| *a * s)
    }
}
