use std::fmt;
use std::marker::PhantomData;

use super::value::{tag_of, Element, Value};
use super::{DynTuple, TypeTag};

/// Wildcard absorbing any number of elements of any type.
#[derive(Debug)]
pub struct Anything;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CastSlot {
    Tag(TypeTag),
    Anything,
}

/// One position of a cast request: an element type or [`Anything`].
pub trait CastItem {
    type Ref<'a>;

    /// `None` if the type is not registered, which makes every cast fail.
    fn slot() -> Option<CastSlot>;

    fn fetch<'a>(values: &'a [Value], positions: &mut std::slice::Iter<'_, usize>)
        -> Self::Ref<'a>;
}

impl<T: Element> CastItem for T {
    type Ref<'a> = &'a T;

    fn slot() -> Option<CastSlot> {
        tag_of::<T>().map(CastSlot::Tag)
    }

    fn fetch<'a>(values: &'a [Value], positions: &mut std::slice::Iter<'_, usize>) -> &'a T {
        let pos = positions.next().expect("position per typed slot");
        values[*pos].downcast_ref().expect("tag checked by cast")
    }
}

impl CastItem for Anything {
    type Ref<'a> = ();

    fn slot() -> Option<CastSlot> {
        Some(CastSlot::Anything)
    }

    fn fetch(_: &[Value], _: &mut std::slice::Iter<'_, usize>) {}
}

/// A tuple of [`CastItem`]s.
pub trait CastList {
    type Refs<'a>;

    fn slots() -> Option<Vec<CastSlot>>;

    fn fetch<'a>(values: &'a [Value], positions: &[usize]) -> Self::Refs<'a>;
}

macro_rules! cast_list {
    ($($t:ident),*) => {
        impl<$($t: CastItem),*> CastList for ($($t,)*) {
            type Refs<'a> = ($($t::Ref<'a>,)*);

            fn slots() -> Option<Vec<CastSlot>> {
                Some(vec![$($t::slot()?),*])
            }

            #[allow(unused_variables, unused_mut, clippy::unused_unit)]
            fn fetch<'a>(values: &'a [Value], positions: &[usize]) -> Self::Refs<'a> {
                let mut it = positions.iter();
                ($($t::fetch(values, &mut it),)*)
            }
        }
    };
}

cast_list!();
cast_list!(A);
cast_list!(A, B);
cast_list!(A, B, C);
cast_list!(A, B, C, D);
cast_list!(A, B, C, D, E);
cast_list!(A, B, C, D, E, F);
cast_list!(A, B, C, D, E, F, G);
cast_list!(A, B, C, D, E, F, G, H);

/// Result of a successful [`DynTuple::cast`]. Keeps the origin tuple alive.
pub struct TypedView<L> {
    origin: DynTuple,
    positions: Vec<usize>,
    _list: PhantomData<fn() -> L>,
}

impl<L: CastList> TypedView<L> {
    pub(super) fn new(origin: DynTuple) -> Option<Self> {
        let slots = L::slots()?;
        let positions = origin.match_slots(&slots)?;
        Some(TypedView {
            origin,
            positions,
            _list: PhantomData,
        })
    }

    /// References to the typed elements; wildcard positions yield `()`.
    pub fn get(&self) -> L::Refs<'_> {
        L::fetch(self.origin.values(), &self.positions)
    }

    pub fn origin(&self) -> &DynTuple {
        &self.origin
    }

    pub fn into_origin(self) -> DynTuple {
        self.origin
    }
}

impl<L> fmt::Debug for TypedView<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TypedView")
            .field("origin", &self.origin)
            .field("positions", &self.positions)
            .finish()
    }
}
