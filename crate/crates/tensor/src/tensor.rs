use std::cell::RefCell;
use std::collections::{HashMap, HashSet};
use std::rc::Rc;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::element::Element;
use crate::error::{Result, TensorError};

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

/// Gradient function of one operator node.
///
/// Receives the gradient flowing into the node's output and a `needs` flag
/// per parent; returns one optional gradient buffer per parent (dense, same
/// layout as the parent's data). A parent whose flag is `false` may be
/// skipped by returning `None`.
pub(crate) type BackwardFn<T> = Box<dyn Fn(&[T], &[bool]) -> Vec<Option<Vec<T>>>>;

struct Inner<T: Element> {
    id: u64,
    shape: Vec<usize>,
    data: Vec<T>,
    requires_grad: bool,
    grad: RefCell<Option<Vec<T>>>,
    parents: Vec<Tensor<T>>,
    backward_fn: Option<BackwardFn<T>>,
}

/// Dense N-dimensional array participating in a differentiable computation
/// graph. Canonical image layout is `[batch, channels, height, width]`,
/// row-major.
///
/// Cloning a `Tensor` is cheap — it copies a reference-counted handle, never
/// the data. Data is immutable once the tensor is produced; gradients live in
/// an interior-mutable side buffer and accumulate across `backward` calls
/// until [`Tensor::clear_grad`].
pub struct Tensor<T: Element> {
    inner: Rc<Inner<T>>,
}

impl<T: Element> Clone for Tensor<T> {
    fn clone(&self) -> Self {
        Tensor {
            inner: Rc::clone(&self.inner),
        }
    }
}

impl<T: Element> std::fmt::Debug for Tensor<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Tensor(id={}, shape={:?}, requires_grad={})",
            self.inner.id, self.inner.shape, self.inner.requires_grad
        )
    }
}

fn check_shape<T: Element>(data: &[T], shape: &[usize]) -> Result<()> {
    let numel: usize = shape.iter().product();
    if data.len() != numel {
        return Err(TensorError::ShapeMismatch {
            op: "construct",
            details: format!("data length {} != shape {:?} product", data.len(), shape),
        });
    }
    Ok(())
}

impl<T: Element> Tensor<T> {
    fn make(
        shape: Vec<usize>,
        data: Vec<T>,
        requires_grad: bool,
        parents: Vec<Tensor<T>>,
        backward_fn: Option<BackwardFn<T>>,
    ) -> Self {
        Tensor {
            inner: Rc::new(Inner {
                id: NEXT_ID.fetch_add(1, Ordering::Relaxed),
                shape,
                data,
                requires_grad,
                grad: RefCell::new(None),
                parents,
                backward_fn,
            }),
        }
    }

    /// Leaf tensor that does not require gradients (inputs, targets).
    pub fn from_vec(data: Vec<T>, shape: &[usize]) -> Result<Self> {
        check_shape(&data, shape)?;
        Ok(Self::make(shape.to_vec(), data, false, Vec::new(), None))
    }

    /// Leaf tensor that accumulates gradients (a trainable parameter).
    pub fn param(data: Vec<T>, shape: &[usize]) -> Result<Self> {
        check_shape(&data, shape)?;
        Ok(Self::make(shape.to_vec(), data, true, Vec::new(), None))
    }

    pub fn zeros(shape: &[usize]) -> Self {
        let numel = shape.iter().product();
        Self::make(shape.to_vec(), vec![T::ZERO; numel], false, Vec::new(), None)
    }

    pub fn full(shape: &[usize], value: T) -> Self {
        let numel = shape.iter().product();
        Self::make(shape.to_vec(), vec![value; numel], false, Vec::new(), None)
    }

    pub fn scalar(value: T) -> Self {
        Self::make(vec![], vec![value], false, Vec::new(), None)
    }

    /// Operator output node. Checks finiteness of the result, derives
    /// `requires_grad` from the parents, and prunes the graph below
    /// gradient-free subtrees.
    pub(crate) fn from_op(
        op: &'static str,
        shape: Vec<usize>,
        data: Vec<T>,
        parents: Vec<Tensor<T>>,
        backward_fn: BackwardFn<T>,
    ) -> Result<Self> {
        debug_assert_eq!(data.len(), shape.iter().product::<usize>());
        if data.iter().any(|v| !v.is_finite_val()) {
            return Err(TensorError::NonFinite { op });
        }
        let requires_grad = parents.iter().any(|p| p.requires_grad());
        if requires_grad {
            Ok(Self::make(shape, data, true, parents, Some(backward_fn)))
        } else {
            Ok(Self::make(shape, data, false, Vec::new(), None))
        }
    }

    pub fn id(&self) -> u64 {
        self.inner.id
    }

    pub fn shape(&self) -> &[usize] {
        &self.inner.shape
    }

    pub fn numel(&self) -> usize {
        self.inner.data.len()
    }

    pub fn requires_grad(&self) -> bool {
        self.inner.requires_grad
    }

    pub fn data(&self) -> &[T] {
        &self.inner.data
    }

    /// Value of a scalar (single-element) tensor.
    pub fn item(&self) -> T {
        assert_eq!(self.numel(), 1, "item() on non-scalar tensor");
        self.inner.data[0]
    }

    /// Copy of the accumulated gradient, if any.
    pub fn grad(&self) -> Option<Vec<T>> {
        self.inner.grad.borrow().clone()
    }

    /// Accumulated gradient, or zeros when the tensor never received one
    /// (an unused parameter has gradient zero).
    pub fn grad_or_zeros(&self) -> Vec<T> {
        self.inner
            .grad
            .borrow()
            .clone()
            .unwrap_or_else(|| vec![T::ZERO; self.numel()])
    }

    pub fn clear_grad(&self) {
        *self.inner.grad.borrow_mut() = None;
    }

    /// Cut the tensor out of its graph: same data, no parents, no gradient
    /// requirement.
    pub fn detach(&self) -> Self {
        Self::make(
            self.inner.shape.clone(),
            self.inner.data.clone(),
            false,
            Vec::new(),
            None,
        )
    }

    pub(crate) fn accumulate_grad(&self, g: &[T]) {
        debug_assert_eq!(g.len(), self.numel());
        let mut slot = self.inner.grad.borrow_mut();
        match slot.as_mut() {
            Some(buf) => {
                for (a, b) in buf.iter_mut().zip(g) {
                    *a += *b;
                }
            }
            None => *slot = Some(g.to_vec()),
        }
    }

    /// Reverse-mode gradient accumulation from a scalar loss.
    ///
    /// Seeds d(loss)/d(loss) = 1 and walks the graph in reverse creation
    /// order, accumulating into every gradient-requiring tensor reachable
    /// from the loss. Calling it twice on the same graph doubles the
    /// gradients; use [`Tensor::clear_grad`] to reset.
    pub fn backward(&self) -> Result<()> {
        if self.numel() != 1 {
            return Err(TensorError::NotScalar { numel: self.numel() });
        }
        if !self.requires_grad() {
            return Ok(());
        }

        // Node ids increase monotonically at creation and parents are always
        // created before children, so descending id order is a valid reverse
        // topological order.
        let mut nodes: HashMap<u64, Tensor<T>> = HashMap::new();
        let mut seen: HashSet<u64> = HashSet::new();
        let mut stack = vec![self.clone()];
        while let Some(t) = stack.pop() {
            if !seen.insert(t.id()) {
                continue;
            }
            for p in &t.inner.parents {
                if p.requires_grad() {
                    stack.push(p.clone());
                }
            }
            nodes.insert(t.id(), t);
        }
        let mut order: Vec<u64> = nodes.keys().copied().collect();
        order.sort_unstable_by(|a, b| b.cmp(a));

        // Per-call gradients are built in a transient table and folded into
        // the persistent buffers as each node is finished, so repeated
        // backward calls on one graph accumulate exactly once per call.
        let mut pending: HashMap<u64, Vec<T>> = HashMap::new();
        pending.insert(self.id(), vec![T::ONE]);

        for id in order {
            let node = &nodes[&id];
            let Some(grad_out) = pending.remove(&id) else {
                continue;
            };
            node.accumulate_grad(&grad_out);
            let Some(backward_fn) = node.inner.backward_fn.as_ref() else {
                continue; // leaf
            };
            let needs: Vec<bool> = node
                .inner
                .parents
                .iter()
                .map(|p| p.requires_grad())
                .collect();
            let parent_grads = backward_fn(&grad_out, &needs);
            debug_assert_eq!(parent_grads.len(), node.inner.parents.len());
            for (parent, grad) in node.inner.parents.iter().zip(parent_grads) {
                if let Some(g) = grad {
                    if !parent.requires_grad() {
                        continue;
                    }
                    match pending.get_mut(&parent.id()) {
                        Some(buf) => {
                            for (a, b) in buf.iter_mut().zip(&g) {
                                *a += *b;
                            }
                        }
                        None => {
                            pending.insert(parent.id(), g);
                        }
                    }
                }
            }
        }
        Ok(())
    }
}
