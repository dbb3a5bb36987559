//! Iterated wreath products of symmetric groups and their action on the
//! product domain.
//!
//! An element over signature `(n_1, …, n_k)` is a permutation of degree
//! `n_1` (the top) together with `n_1` child elements over `(n_2, …, n_k)`.
//! The action on a point `(i_1, …, i_k)` sends the first coordinate
//! through the top and the remaining coordinates through the child
//! selected by the *input* first coordinate. Composition and inversion
//! are the unique laws making the action a homomorphism; they are not
//! transcribed from a semidirect-product formula, and the property tests
//! below pin them down.

use std::collections::VecDeque;
use std::fmt;

use rand::Rng;

use crate::perm::{factorial, Permutation};
use crate::{Error, Result};

/// An element of `S_{n_k} ≀ … ≀ S_{n_1}` acting on the product domain
/// `[n_1] × … × [n_k]`. Depth 1 is a plain permutation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WreathElement {
    top: Permutation,
    children: Vec<WreathElement>,
}

impl WreathElement {
    /// The identity element over `signature`, listed top-down.
    pub fn identity(signature: &[usize]) -> Result<Self> {
        check_signature(signature)?;
        Ok(Self::identity_unchecked(signature))
    }

    fn identity_unchecked(signature: &[usize]) -> Self {
        let top = Permutation::identity(signature[0]);
        let children = if signature.len() == 1 {
            Vec::new()
        } else {
            vec![Self::identity_unchecked(&signature[1..]); signature[0]]
        };
        WreathElement { top, children }
    }

    /// Uniform over the wreath product: the top and every child are drawn
    /// independently uniformly, which induces the uniform distribution on
    /// the whole product.
    pub fn random<R: Rng + ?Sized>(signature: &[usize], rng: &mut R) -> Result<Self> {
        check_signature(signature)?;
        Ok(Self::random_unchecked(signature, rng))
    }

    fn random_unchecked<R: Rng + ?Sized>(signature: &[usize], rng: &mut R) -> Self {
        let top = Permutation::random(signature[0], rng);
        let children = if signature.len() == 1 {
            Vec::new()
        } else {
            (0..signature[0])
                .map(|_| Self::random_unchecked(&signature[1..], rng))
                .collect()
        };
        WreathElement { top, children }
    }

    /// Lifts a plain permutation to a depth-1 element.
    pub fn from_permutation(p: Permutation) -> Self {
        WreathElement {
            top: p,
            children: Vec::new(),
        }
    }

    pub fn depth(&self) -> usize {
        if self.children.is_empty() {
            1
        } else {
            1 + self.children[0].depth()
        }
    }

    pub fn signature(&self) -> Vec<usize> {
        let mut sig = vec![self.top.degree()];
        if let Some(c) = self.children.first() {
            sig.extend(c.signature());
        }
        sig
    }

    /// Size of the product domain.
    pub fn domain_size(&self) -> usize {
        self.signature().iter().product()
    }

    pub fn is_identity(&self) -> bool {
        self.top.is_identity() && self.children.iter().all(|c| c.is_identity())
    }

    /// Applies the element to a point `(i_1, …, i_k)` of the product
    /// domain: `(i_1, rest) ↦ (top(i_1), child[i_1](rest))`.
    pub fn act(&self, point: &[usize]) -> Result<Vec<usize>> {
        let sig = self.signature();
        if point.len() != sig.len() {
            return Err(Error::SignatureMismatch {
                left: sig,
                right: point.to_vec(),
            });
        }
        for (p, n) in point.iter().zip(&sig) {
            if p >= n {
                return Err(Error::OutOfRange {
                    point: *p,
                    bound: *n,
                });
            }
        }
        Ok(self.act_unchecked(point))
    }

    fn act_unchecked(&self, point: &[usize]) -> Vec<usize> {
        let s = point[0];
        let mut out = vec![self.top.apply(s)];
        if !self.children.is_empty() {
            out.extend(self.children[s].act_unchecked(&point[1..]));
        }
        out
    }

    /// `self ∘ other`: apply `other` first. Derived from the action so
    /// that `act(a.compose(b), p) = act(a, act(b, p))`.
    pub fn compose(&self, other: &WreathElement) -> Result<WreathElement> {
        let (sa, sb) = (self.signature(), other.signature());
        if sa != sb {
            return Err(Error::SignatureMismatch {
                left: sa,
                right: sb,
            });
        }
        let top = self.top.compose(&other.top)?;
        let children = other
            .children
            .iter()
            .enumerate()
            .map(|(s, bc)| self.children[other.top.apply(s)].compose(bc))
            .collect::<Result<Vec<_>>>()?;
        Ok(WreathElement { top, children })
    }

    pub fn inverse(&self) -> WreathElement {
        let top = self.top.inverse();
        let children = if self.children.is_empty() {
            Vec::new()
        } else {
            (0..self.top.degree())
                .map(|s| self.children[top.apply(s)].inverse())
                .collect()
        };
        WreathElement { top, children }
    }

    /// The permutation of the flattened product domain induced by the
    /// action; the flattening is mixed-radix with the top coordinate most
    /// significant. This embedding is faithful.
    pub fn to_permutation(&self) -> Permutation {
        let sig = self.signature();
        let size: usize = sig.iter().product();
        let mut images = Vec::with_capacity(size);
        let mut point = vec![0usize; sig.len()];
        for idx in 0..size {
            unflatten(idx, &sig, &mut point);
            images.push(flatten(&self.act_unchecked(&point), &sig));
        }
        Permutation::from_images(images).expect("action of a bijection")
    }
}

impl fmt::Display for WreathElement {
    /// Nested parenthesized form: depth 1 prints as the image list, deeper
    /// elements as `(top; child_0, child_1, …)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.children.is_empty() {
            return write!(f, "{}", self.top);
        }
        write!(f, "({}; ", self.top)?;
        for (i, c) in self.children.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

fn check_signature(signature: &[usize]) -> Result<()> {
    if signature.is_empty() {
        return Err(Error::InvalidParameter("empty wreath signature".into()));
    }
    if signature.contains(&0) {
        return Err(Error::InvalidParameter(
            "wreath signature entries must be >= 1".into(),
        ));
    }
    Ok(())
}

/// Flattens a product-domain point to a single index, top coordinate most
/// significant.
pub fn flatten(point: &[usize], signature: &[usize]) -> usize {
    point
        .iter()
        .zip(signature)
        .fold(0, |acc, (&p, &n)| acc * n + p)
}

/// Inverse of [`flatten`].
pub fn unflatten(mut idx: usize, signature: &[usize], out: &mut [usize]) {
    for j in (0..signature.len()).rev() {
        out[j] = idx % signature[j];
        idx /= signature[j];
    }
}

/// Order of the wreath product over `signature`.
pub fn wreath_order(signature: &[usize]) -> u128 {
    match signature {
        [] => 1,
        [n, rest @ ..] => {
            let tail = wreath_order(rest);
            factorial(*n) * tail.pow(*n as u32)
        }
    }
}

/// Every element of the wreath product over `signature`, for exhaustive
/// small-case oracles. Errors when the group order exceeds `budget`.
pub fn enumerate_all(signature: &[usize], budget: u128) -> Result<Vec<WreathElement>> {
    check_signature(signature)?;
    let order = wreath_order(signature);
    if order > budget {
        return Err(Error::BudgetExceeded {
            needed: order,
            budget,
        });
    }
    let tops = crate::perm::all_permutations(signature[0], budget)?;
    if signature.len() == 1 {
        return Ok(tops
            .into_iter()
            .map(WreathElement::from_permutation)
            .collect());
    }
    let tails = enumerate_all(&signature[1..], budget)?;
    let mut out = Vec::with_capacity(order as usize);
    let slots = signature[0];
    let mut pick = vec![0usize; slots];
    for top in &tops {
        loop {
            let children: Vec<WreathElement> = pick.iter().map(|&i| tails[i].clone()).collect();
            out.push(WreathElement {
                top: top.clone(),
                children,
            });
            // Odometer over child choices.
            let mut slot = slots;
            loop {
                if slot == 0 {
                    break;
                }
                slot -= 1;
                pick[slot] += 1;
                if pick[slot] < tails.len() {
                    break;
                }
                pick[slot] = 0;
            }
            if pick.iter().all(|&i| i == 0) {
                break;
            }
        }
    }
    Ok(out)
}

/// True iff the group generated by `gens` acts with a single orbit on the
/// full product domain. Errors when the domain exceeds `budget`.
pub fn wreath_orbit_transitive(gens: &[WreathElement], budget: u128) -> Result<bool> {
    let Some(first) = gens.first() else {
        return Ok(false);
    };
    let sig = first.signature();
    for g in gens {
        if g.signature() != sig {
            return Err(Error::SignatureMismatch {
                left: sig,
                right: g.signature(),
            });
        }
    }
    let size: usize = sig.iter().product();
    if size as u128 > budget {
        return Err(Error::BudgetExceeded {
            needed: size as u128,
            budget,
        });
    }
    if size <= 1 {
        return Ok(true);
    }
    // Forward closure on flattened points, via the induced permutations.
    let tables: Vec<Permutation> = gens.iter().map(|g| g.to_permutation()).collect();
    let mut seen = vec![false; size];
    seen[0] = true;
    let mut reached = 1;
    let mut queue = VecDeque::from([0usize]);
    while let Some(p) = queue.pop_front() {
        for t in &tables {
            let q = t.apply(p);
            if !seen[q] {
                seen[q] = true;
                reached += 1;
                if reached == size {
                    return Ok(true);
                }
                queue.push_back(q);
            }
        }
    }
    Ok(false)
}
