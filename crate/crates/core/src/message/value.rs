use std::any::{self, Any, TypeId};
use std::collections::HashMap;
use std::fmt;
use std::sync::{OnceLock, RwLock};

use crate::atom::Atom;
use crate::message::{DynTuple, TupleError};
use crate::runtime::{ActorRef, DownMessage, ExitMessage, ExitReason};

/// Anything that can be stored in a message tuple.
///
/// Implemented for every `Clone + PartialEq + Debug + Send + Sync` type, but a
/// type must also be registered (see [`register_type`]) before values of it
/// can be put into a tuple.
pub trait Element: Any + Clone + PartialEq + fmt::Debug + Send + Sync {}

impl<T: Any + Clone + PartialEq + fmt::Debug + Send + Sync> Element for T {}

/// Runtime identifier of a registered element type.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeTag(u32);

impl TypeTag {
    pub const BOOL: TypeTag = TypeTag(1);
    pub const I32: TypeTag = TypeTag(2);
    pub const I64: TypeTag = TypeTag(3);
    pub const U32: TypeTag = TypeTag(4);
    pub const U64: TypeTag = TypeTag(5);
    pub const F32: TypeTag = TypeTag(6);
    pub const F64: TypeTag = TypeTag(7);
    pub const STRING: TypeTag = TypeTag(8);
    pub const ATOM: TypeTag = TypeTag(9);
    pub const TUPLE: TypeTag = TypeTag(10);
    pub const I32_VEC: TypeTag = TypeTag(11);
    pub const ACTOR: TypeTag = TypeTag(12);
    pub const EXIT_REASON: TypeTag = TypeTag(13);
    pub const EXIT_MESSAGE: TypeTag = TypeTag(14);
    pub const DOWN_MESSAGE: TypeTag = TypeTag(15);
    pub const U64_VEC: TypeTag = TypeTag(16);

    const FIRST_USER: u32 = 64;

    pub fn id(self) -> u32 {
        self.0
    }

    pub fn name(self) -> String {
        registry()
            .read()
            .unwrap()
            .names
            .get(&self)
            .cloned()
            .unwrap_or_else(|| format!("#{}", self.0))
    }
}

impl fmt::Debug for TypeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

struct Registry {
    by_type: HashMap<TypeId, TypeTag>,
    names: HashMap<TypeTag, String>,
    next: u32,
}

fn builtins() -> [(TypeId, TypeTag, &'static str); 16] {
    [
        (TypeId::of::<bool>(), TypeTag::BOOL, "bool"),
        (TypeId::of::<i32>(), TypeTag::I32, "i32"),
        (TypeId::of::<i64>(), TypeTag::I64, "i64"),
        (TypeId::of::<u32>(), TypeTag::U32, "u32"),
        (TypeId::of::<u64>(), TypeTag::U64, "u64"),
        (TypeId::of::<f32>(), TypeTag::F32, "f32"),
        (TypeId::of::<f64>(), TypeTag::F64, "f64"),
        (TypeId::of::<String>(), TypeTag::STRING, "string"),
        (TypeId::of::<Atom>(), TypeTag::ATOM, "atom"),
        (TypeId::of::<DynTuple>(), TypeTag::TUPLE, "tuple"),
        (TypeId::of::<Vec<i32>>(), TypeTag::I32_VEC, "i32_vec"),
        (TypeId::of::<ActorRef>(), TypeTag::ACTOR, "actor"),
        (
            TypeId::of::<ExitReason>(),
            TypeTag::EXIT_REASON,
            "exit_reason",
        ),
        (
            TypeId::of::<ExitMessage>(),
            TypeTag::EXIT_MESSAGE,
            "exit_msg",
        ),
        (
            TypeId::of::<DownMessage>(),
            TypeTag::DOWN_MESSAGE,
            "down_msg",
        ),
        (TypeId::of::<Vec<u64>>(), TypeTag::U64_VEC, "u64_vec"),
    ]
}

fn registry() -> &'static RwLock<Registry> {
    static REGISTRY: OnceLock<RwLock<Registry>> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        let mut reg = Registry {
            by_type: HashMap::new(),
            names: HashMap::new(),
            next: TypeTag::FIRST_USER,
        };
        for (id, tag, name) in builtins() {
            reg.by_type.insert(id, tag);
            reg.names.insert(tag, name.to_string());
        }
        RwLock::new(reg)
    })
}

/// Registers `T` under `name`, returning its tag. Registering the same type
/// twice returns the existing tag.
pub fn register_type<T: Element>(name: &str) -> TypeTag {
    let mut reg = registry().write().unwrap();
    if let Some(tag) = reg.by_type.get(&TypeId::of::<T>()) {
        return *tag;
    }
    let tag = TypeTag(reg.next);
    reg.next += 1;
    reg.by_type.insert(TypeId::of::<T>(), tag);
    reg.names.insert(tag, name.to_string());
    tag
}

/// Tag of `T`, or `None` if the type was never registered.
pub fn tag_of<T: Any>() -> Option<TypeTag> {
    let id = TypeId::of::<T>();
    // hot path: builtins never touch the lock
    if let Some((_, tag, _)) = builtins().iter().find(|(b, _, _)| *b == id) {
        return Some(*tag);
    }
    registry().read().unwrap().by_type.get(&id).copied()
}

pub(crate) fn require_tag<T: Any>() -> Result<TypeTag, TupleError> {
    tag_of::<T>().ok_or(TupleError::Unregistered(any::type_name::<T>()))
}

trait DynElement: Send + Sync {
    fn clone_box(&self) -> Box<dyn DynElement>;
    fn eq_dyn(&self, other: &dyn Any) -> bool;
    fn fmt_dyn(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result;
    fn as_any(&self) -> &dyn Any;
    fn as_any_mut(&mut self) -> &mut dyn Any;
    fn into_any(self: Box<Self>) -> Box<dyn Any>;
}

impl<T: Element> DynElement for T {
    fn clone_box(&self) -> Box<dyn DynElement> {
        Box::new(self.clone())
    }

    fn eq_dyn(&self, other: &dyn Any) -> bool {
        other.downcast_ref::<T>().is_some_and(|o| o == self)
    }

    fn fmt_dyn(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }

    fn as_any(&self) -> &dyn Any {
        self
    }

    fn as_any_mut(&mut self) -> &mut dyn Any {
        self
    }

    fn into_any(self: Box<Self>) -> Box<dyn Any> {
        self
    }
}

/// A single type-erased tuple element.
pub struct Value {
    tag: TypeTag,
    data: Box<dyn DynElement>,
}

impl Value {
    pub fn new<T: Element>(v: T) -> Result<Value, TupleError> {
        Ok(Value {
            tag: require_tag::<T>()?,
            data: Box::new(v),
        })
    }

    fn builtin<T: Element>(tag: TypeTag, v: T) -> Value {
        Value {
            tag,
            data: Box::new(v),
        }
    }

    pub fn tag(&self) -> TypeTag {
        self.tag
    }

    pub fn is<T: Any>(&self) -> bool {
        self.data.as_any().is::<T>()
    }

    pub fn downcast_ref<T: Any>(&self) -> Option<&T> {
        self.data.as_any().downcast_ref()
    }

    pub fn downcast_mut<T: Any>(&mut self) -> Option<&mut T> {
        self.data.as_any_mut().downcast_mut()
    }

    pub fn into_inner<T: Any>(self) -> Result<T, Value> {
        if self.is::<T>() {
            Ok(*self.data.into_any().downcast::<T>().expect("checked above"))
        } else {
            Err(self)
        }
    }

    /// Integer view of any builtin integer element.
    pub fn as_i64(&self) -> Option<i64> {
        let any = self.data.as_any();
        if let Some(v) = any.downcast_ref::<i32>() {
            Some(*v as i64)
        } else if let Some(v) = any.downcast_ref::<i64>() {
            Some(*v)
        } else if let Some(v) = any.downcast_ref::<u32>() {
            Some(*v as i64)
        } else {
            any.downcast_ref::<u64>()
                .and_then(|v| i64::try_from(*v).ok())
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        let any = self.data.as_any();
        if let Some(v) = any.downcast_ref::<f32>() {
            Some(*v as f64)
        } else if let Some(v) = any.downcast_ref::<f64>() {
            Some(*v)
        } else {
            self.as_i64().map(|i| i as f64)
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        self.downcast_ref::<bool>().copied()
    }
}

impl Clone for Value {
    fn clone(&self) -> Self {
        Value {
            tag: self.tag,
            data: self.data.clone_box(),
        }
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Value) -> bool {
        self.tag == other.tag && self.data.eq_dyn(other.data.as_any())
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(a) = self.downcast_ref::<Atom>() {
            f.write_str(&a.text())
        } else {
            self.data.fmt_dyn(f)
        }
    }
}

/// Conversion used by the [`tuple!`](crate::tuple) macro. Implemented for
/// [`Value`] and every builtin element type, so it never fails.
pub trait IntoValue {
    fn into_value(self) -> Value;
}

impl IntoValue for Value {
    fn into_value(self) -> Value {
        self
    }
}

impl IntoValue for &str {
    fn into_value(self) -> Value {
        Value::builtin(TypeTag::STRING, self.to_string())
    }
}

macro_rules! builtin_value {
    ($($t:ty => $tag:ident),* $(,)?) => {
        $(
            impl IntoValue for $t {
                fn into_value(self) -> Value {
                    Value::builtin(TypeTag::$tag, self)
                }
            }

            impl From<$t> for Value {
                fn from(v: $t) -> Value {
                    Value::builtin(TypeTag::$tag, v)
                }
            }
        )*
    };
}

builtin_value! {
    bool => BOOL,
    i32 => I32,
    i64 => I64,
    u32 => U32,
    u64 => U64,
    f32 => F32,
    f64 => F64,
    String => STRING,
    Atom => ATOM,
    DynTuple => TUPLE,
    Vec<i32> => I32_VEC,
    ActorRef => ACTOR,
    ExitReason => EXIT_REASON,
    ExitMessage => EXIT_MESSAGE,
    DownMessage => DOWN_MESSAGE,
    Vec<u64> => U64_VEC,
}

impl From<&str> for Value {
    fn from(v: &str) -> Value {
        v.into_value()
    }
}
