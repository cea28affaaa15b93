use std::sync::Arc;

use crate::message::{tag_of, Element, TupleError, TypeTag, Value};

use super::PatternError;

pub(crate) type HandlerFn = Arc<dyn Fn(Vec<Value>) + Send + Sync>;

/// Callbacks usable as case handlers: closures taking up to eight element
/// arguments. `Args` is the argument tuple and only guides inference.
pub trait IntoHandler<Args>: Send + Sync + 'static {
    fn param_tags() -> Result<Vec<TypeTag>, PatternError>;

    fn into_handler(self) -> HandlerFn;
}

fn param_tag<T: Element>() -> Result<TypeTag, PatternError> {
    tag_of::<T>().ok_or(PatternError::Tuple(TupleError::Unregistered(
        std::any::type_name::<T>(),
    )))
}

macro_rules! into_handler {
    ($($t:ident),*) => {
        impl<Func, $($t),*> IntoHandler<($($t,)*)> for Func
        where
            Func: Fn($($t),*) + Send + Sync + 'static,
            $($t: Element,)*
        {
            fn param_tags() -> Result<Vec<TypeTag>, PatternError> {
                Ok(vec![$(param_tag::<$t>()?),*])
            }

            #[allow(unused_variables, unused_mut, non_snake_case)]
            fn into_handler(self) -> HandlerFn {
                Arc::new(move |args: Vec<Value>| {
                    let mut it = args.into_iter();
                    $(
                        let $t: $t = it
                            .next()
                            .expect("arity checked at construction")
                            .into_inner()
                            .expect("types checked at construction");
                    )*
                    (self)($($t),*)
                })
            }
        }
    };
}

into_handler!();
into_handler!(A);
into_handler!(A, B);
into_handler!(A, B, C);
into_handler!(A, B, C, D);
into_handler!(A, B, C, D, E);
into_handler!(A, B, C, D, E, F);
into_handler!(A, B, C, D, E, F, G);
into_handler!(A, B, C, D, E, F, G, H);
