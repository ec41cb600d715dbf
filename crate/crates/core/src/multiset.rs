//! Finite multisets stored in canonical (sorted) form.

use std::fmt;
use std::ops::Add;

/// A finite multiset. Elements are kept sorted, so structural equality is
/// multiset equality.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Multiset<T> {
    elems: Vec<T>,
}

impl<T> Default for Multiset<T> {
    fn default() -> Self {
        Multiset { elems: Vec::new() }
    }
}

impl<T: Ord> Multiset<T> {
    pub fn new() -> Self {
        Multiset { elems: Vec::new() }
    }

    pub fn singleton(x: T) -> Self {
        Multiset { elems: vec![x] }
    }

    /// Builds the multiset of a list, i.e. its equivalence class under permutation.
    pub fn from_list(mut elems: Vec<T>) -> Self {
        elems.sort();
        Multiset { elems }
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.elems.iter()
    }

    /// The canonical representative: the sorted list.
    pub fn as_slice(&self) -> &[T] {
        &self.elems
    }

    pub fn into_vec(self) -> Vec<T> {
        self.elems
    }

    pub fn count(&self, x: &T) -> usize {
        self.elems.iter().filter(|y| *y == x).count()
    }

    pub fn contains(&self, x: &T) -> bool {
        self.elems.binary_search(x).is_ok()
    }

    /// Distinct elements, in order.
    pub fn distinct(&self) -> Vec<&T> {
        let mut out: Vec<&T> = Vec::new();
        for x in &self.elems {
            if out.last().map_or(true, |y| *y != x) {
                out.push(x);
            }
        }
        out
    }
}

impl<T: Ord + Clone> Multiset<T> {
    pub fn insert(&self, x: T) -> Self {
        let mut elems = self.elems.clone();
        let pos = elems.partition_point(|y| *y <= x);
        elems.insert(pos, x);
        Multiset { elems }
    }

    /// Removes one occurrence of `x`; `None` when `x` does not occur.
    pub fn remove_one(&self, x: &T) -> Option<Self> {
        let pos = self.elems.binary_search(x).ok()?;
        let mut elems = self.elems.clone();
        elems.remove(pos);
        Some(Multiset { elems })
    }

    pub fn map<U: Ord, F: FnMut(&T) -> U>(&self, f: F) -> Multiset<U> {
        Multiset::from_list(self.elems.iter().map(f).collect())
    }

    /// All lists whose multiset is `self`, each exactly once, in lexicographic order.
    pub fn distinct_permutations(&self) -> Vec<Vec<T>> {
        let mut out = Vec::new();
        let mut current = self.elems.clone();
        loop {
            out.push(current.clone());
            if !next_permutation(&mut current) {
                break;
            }
        }
        out
    }

    /// Every way of writing `self` as `a + b`, listed as `(a, b)` without repetition.
    pub fn splits(&self) -> Vec<(Self, Self)> {
        let groups = self.groups();
        let mut out = Vec::new();
        let mut choice = vec![0usize; groups.len()];
        loop {
            let mut left = Vec::new();
            let mut right = Vec::new();
            for ((x, n), &c) in groups.iter().zip(&choice) {
                for _ in 0..c {
                    left.push(x.clone());
                }
                for _ in c..*n {
                    right.push(x.clone());
                }
            }
            out.push((Multiset { elems: left }, Multiset { elems: right }));
            // odometer over 0..=n for each group
            let mut i = 0;
            loop {
                if i == groups.len() {
                    return out;
                }
                if choice[i] < groups[i].1 {
                    choice[i] += 1;
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
        }
    }

    fn groups(&self) -> Vec<(T, usize)> {
        let mut groups: Vec<(T, usize)> = Vec::new();
        for x in &self.elems {
            match groups.last_mut() {
                Some((y, n)) if y == x => *n += 1,
                _ => groups.push((x.clone(), 1)),
            }
        }
        groups
    }
}

impl<T: Ord + Clone> Add for &Multiset<T> {
    type Output = Multiset<T>;

    fn add(self, other: &Multiset<T>) -> Multiset<T> {
        let mut elems = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.elems.len() && j < other.elems.len() {
            if self.elems[i] <= other.elems[j] {
                elems.push(self.elems[i].clone());
                i += 1;
            } else {
                elems.push(other.elems[j].clone());
                j += 1;
            }
        }
        elems.extend_from_slice(&self.elems[i..]);
        elems.extend_from_slice(&other.elems[j..]);
        Multiset { elems }
    }
}

impl<T: Ord + Clone> Add for Multiset<T> {
    type Output = Multiset<T>;

    fn add(self, other: Multiset<T>) -> Multiset<T> {
        &self + &other
    }
}

impl<T: Ord> FromIterator<T> for Multiset<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        Multiset::from_list(iter.into_iter().collect())
    }
}

impl<'a, T> IntoIterator for &'a Multiset<T> {
    type Item = &'a T;
    type IntoIter = std::slice::Iter<'a, T>;

    fn into_iter(self) -> Self::IntoIter {
        self.elems.iter()
    }
}

impl<T: fmt::Display> fmt::Display for Multiset<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, x) in self.elems.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "]")
    }
}

/// All multisets of size at most `bound` over `pool`, in increasing order of size.
/// `pool` is deduplicated first.
pub fn multisets_up_to<T: Ord + Clone>(pool: &[T], bound: usize) -> Vec<Multiset<T>> {
    let mut pool = pool.to_vec();
    pool.sort();
    pool.dedup();
    let mut out = Vec::new();
    for size in 0..=bound {
        combinations_with_repetition(&pool, size, 0, &mut Vec::new(), &mut out);
    }
    out
}

/// All multisets of exactly `size` elements over `pool`.
pub fn multisets_of_size<T: Ord + Clone>(pool: &[T], size: usize) -> Vec<Multiset<T>> {
    let mut pool = pool.to_vec();
    pool.sort();
    pool.dedup();
    let mut out = Vec::new();
    combinations_with_repetition(&pool, size, 0, &mut Vec::new(), &mut out);
    out
}

fn combinations_with_repetition<T: Clone>(
    pool: &[T],
    size: usize,
    start: usize,
    prefix: &mut Vec<T>,
    out: &mut Vec<Multiset<T>>,
) {
    if prefix.len() == size {
        out.push(Multiset {
            elems: prefix.clone(),
        });
        return;
    }
    for i in start..pool.len() {
        prefix.push(pool[i].clone());
        combinations_with_repetition(pool, size, i, prefix, out);
        prefix.pop();
    }
}

fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}
