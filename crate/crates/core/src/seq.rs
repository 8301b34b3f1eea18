//! Persistent singly linked list with O(1) push, pop and clone.

use std::cmp::Ordering;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

struct Node<T> {
    item: T,
    rest: Seq<T>,
    len: usize,
}

pub struct Seq<T> {
    head: Option<Arc<Node<T>>>,
}

impl<T> Clone for Seq<T> {
    fn clone(&self) -> Self {
        Seq { head: self.head.clone() }
    }
}

impl<T> Default for Seq<T> {
    fn default() -> Self {
        Seq { head: None }
    }
}

impl<T> Seq<T> {
    pub fn empty() -> Self {
        Seq { head: None }
    }

    pub fn len(&self) -> usize {
        self.head.as_ref().map_or(0, |n| n.len)
    }

    pub fn is_empty(&self) -> bool {
        self.head.is_none()
    }

    pub fn push(&self, item: T) -> Self {
        let len = self.len() + 1;
        Seq { head: Some(Arc::new(Node { item, rest: self.clone(), len })) }
    }

    pub fn first(&self) -> Option<&T> {
        self.head.as_ref().map(|n| &n.item)
    }

    pub fn rest(&self) -> Option<&Seq<T>> {
        self.head.as_ref().map(|n| &n.rest)
    }

    pub fn iter(&self) -> SeqIter<'_, T> {
        SeqIter { cur: self.head.as_deref() }
    }

    /// Builds a list whose first element is the first element of `items`.
    pub fn from_slice(items: &[T]) -> Self
    where
        T: Clone,
    {
        let mut s = Seq::empty();
        for it in items.iter().rev() {
            s = s.push(it.clone());
        }
        s
    }

    fn same(&self, other: &Self) -> bool {
        match (&self.head, &other.head) {
            (Some(a), Some(b)) => Arc::ptr_eq(a, b),
            (None, None) => true,
            _ => false,
        }
    }
}

impl<T> Drop for Seq<T> {
    fn drop(&mut self) {
        // unlink iteratively so long lists do not overflow the stack
        let mut cur = self.head.take();
        while let Some(node) = cur {
            match Arc::try_unwrap(node) {
                Ok(mut n) => cur = n.rest.head.take(),
                Err(_) => break,
            }
        }
    }
}

pub struct SeqIter<'a, T> {
    cur: Option<&'a Node<T>>,
}

impl<T> Clone for SeqIter<'_, T> {
    fn clone(&self) -> Self {
        SeqIter { cur: self.cur }
    }
}

impl<'a, T> Iterator for SeqIter<'a, T> {
    type Item = &'a T;
    fn next(&mut self) -> Option<&'a T> {
        let n = self.cur?;
        self.cur = n.rest.head.as_deref();
        Some(&n.item)
    }
}

impl<T: PartialEq> PartialEq for Seq<T> {
    fn eq(&self, other: &Self) -> bool {
        if self.len() != other.len() {
            return false;
        }
        let (mut a, mut b) = (self, other);
        loop {
            if a.same(b) {
                return true;
            }
            match (&a.head, &b.head) {
                (Some(x), Some(y)) => {
                    if x.item != y.item {
                        return false;
                    }
                    a = &x.rest;
                    b = &y.rest;
                }
                _ => return false,
            }
        }
    }
}

impl<T: Eq> Eq for Seq<T> {}

impl<T: Hash> Hash for Seq<T> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.len().hash(state);
        for it in self.iter() {
            it.hash(state);
        }
    }
}

impl<T: Ord> PartialOrd for Seq<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Ord> Ord for Seq<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.iter().cmp(other.iter())
    }
}

impl<T: std::fmt::Debug> std::fmt::Debug for Seq<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn push_pop_share() {
        let a = Seq::from_slice(&[1, 2, 3]);
        let b = a.push(0);
        assert_eq!(b.len(), 4);
        assert_eq!(b.rest().unwrap(), &a);
        assert_eq!(a.iter().copied().collect::<Vec<_>>(), vec![1, 2, 3]);
        assert!(Seq::from_slice(&[1, 2]) < Seq::from_slice(&[1, 3]));
    }

    #[test]
    fn long_list_drops() {
        let mut s = Seq::empty();
        for i in 0..200_000 {
            s = s.push(i);
        }
        drop(s);
    }
}
