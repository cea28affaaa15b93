//! Dynamically typed, copy-on-write message tuples.
//!
//! A [`DynTuple`] is a cheap handle to a shared, immutable sequence of
//! [`Value`]s. Cloning a handle never copies elements. Mutable access through
//! [`DynTuple::get_mut`] detaches the handle first if the payload is shared,
//! copying the whole payload exactly once; later writes through the now
//! unique handle are in place.

mod align;
mod cast;
mod value;

use std::cell::Cell;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use thiserror::Error;

pub(crate) use align::align;
pub use cast::{Anything, CastItem, CastList, CastSlot, TypedView};
pub use value::{register_type, tag_of, Element, IntoValue, TypeTag, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TupleError {
    #[error("type `{0}` is not registered as a message element")]
    Unregistered(&'static str),
    #[error("index {index} out of range for tuple of length {len}")]
    OutOfRange { index: usize, len: usize },
    #[error("element {index} has type {found:?}, expected {expected}")]
    TypeMismatch {
        index: usize,
        expected: &'static str,
        found: TypeTag,
    },
}

thread_local! {
    static LOCAL_COPIES: Cell<u64> = const { Cell::new(0) };
}
static TOTAL_COPIES: AtomicU64 = AtomicU64::new(0);

/// Number of payload deep copies performed by the calling thread.
pub fn deep_copies() -> u64 {
    LOCAL_COPIES.with(Cell::get)
}

/// Number of payload deep copies performed by all threads.
pub fn deep_copies_total() -> u64 {
    TOTAL_COPIES.load(Ordering::Relaxed)
}

struct Payload(Vec<Value>);

impl Clone for Payload {
    fn clone(&self) -> Self {
        let _ = LOCAL_COPIES.try_with(|c| c.set(c.get() + 1));
        TOTAL_COPIES.fetch_add(1, Ordering::Relaxed);
        Payload(self.0.clone())
    }
}

#[derive(Clone)]
pub struct DynTuple(Arc<Payload>);

impl DynTuple {
    pub fn new(values: Vec<Value>) -> DynTuple {
        DynTuple(Arc::new(Payload(values)))
    }

    pub fn empty() -> DynTuple {
        DynTuple::new(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0 .0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0 .0.is_empty()
    }

    pub fn values(&self) -> &[Value] {
        &self.0 .0
    }

    pub fn tags(&self) -> impl Iterator<Item = TypeTag> + '_ {
        self.values().iter().map(Value::tag)
    }

    pub fn value(&self, index: usize) -> Result<&Value, TupleError> {
        self.values().get(index).ok_or(TupleError::OutOfRange {
            index,
            len: self.len(),
        })
    }

    /// Read access. Never copies.
    pub fn get<T: Element>(&self, index: usize) -> Result<&T, TupleError> {
        let v = self.value(index)?;
        v.downcast_ref().ok_or(TupleError::TypeMismatch {
            index,
            expected: std::any::type_name::<T>(),
            found: v.tag(),
        })
    }

    /// Writable slot. Deep-copies the payload first if other handles share it.
    pub fn value_mut(&mut self, index: usize) -> Result<&mut Value, TupleError> {
        let len = self.len();
        if index >= len {
            return Err(TupleError::OutOfRange { index, len });
        }
        Ok(&mut Arc::make_mut(&mut self.0).0[index])
    }

    pub fn get_mut<T: Element>(&mut self, index: usize) -> Result<&mut T, TupleError> {
        // check the type before detaching so a failed call never copies
        let found = self.value(index)?.tag();
        if !self.value(index)?.is::<T>() {
            return Err(TupleError::TypeMismatch {
                index,
                expected: std::any::type_name::<T>(),
                found,
            });
        }
        Ok(self
            .value_mut(index)?
            .downcast_mut()
            .expect("type checked above"))
    }

    pub fn set(&mut self, index: usize, value: impl IntoValue) -> Result<(), TupleError> {
        *self.value_mut(index)? = value.into_value();
        Ok(())
    }

    /// Number of handles sharing this payload.
    pub fn ref_count(&self) -> usize {
        Arc::strong_count(&self.0)
    }

    pub fn shares_payload(&self, other: &DynTuple) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    /// Statically typed view, e.g. `t.cast::<(i32, i32)>()` or
    /// `t.cast::<(Anything, i32)>()`. `None` if the element types do not line
    /// up. Never copies.
    pub fn cast<L: CastList>(&self) -> Option<TypedView<L>> {
        TypedView::new(self.clone())
    }

    /// Dynamic form of [`cast`](Self::cast): positions of the non-wildcard
    /// slots, or `None` on mismatch.
    pub fn match_slots(&self, slots: &[CastSlot]) -> Option<Vec<usize>> {
        let values = self.values();
        align(
            slots.len(),
            values.len(),
            |p| matches!(slots[p], CastSlot::Anything),
            |p, e| matches!(slots[p], CastSlot::Tag(t) if t == values[e].tag()),
        )
    }
}

impl Default for DynTuple {
    fn default() -> Self {
        DynTuple::empty()
    }
}

impl PartialEq for DynTuple {
    fn eq(&self, other: &DynTuple) -> bool {
        self.shares_payload(other) || self.values() == other.values()
    }
}

impl fmt::Display for DynTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.values().iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for DynTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromIterator<Value> for DynTuple {
    fn from_iter<I: IntoIterator<Item = Value>>(iter: I) -> Self {
        DynTuple::new(iter.into_iter().collect())
    }
}

/// Builds a [`DynTuple`] from builtin element values or [`Value`]s.
///
/// ```
/// use actor_core::{atom, tuple};
/// let t = tuple![atom("add"), 1, 2];
/// assert_eq!(t.to_string(), "{add, 1, 2}");
/// ```
#[macro_export]
macro_rules! tuple {
    () => { $crate::message::DynTuple::empty() };
    ($($x:expr),+ $(,)?) => {
        $crate::message::DynTuple::new(vec![$($crate::message::IntoValue::into_value($x)),+])
    };
}
