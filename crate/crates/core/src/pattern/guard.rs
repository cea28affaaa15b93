//! Lazily evaluated guard expressions.
//!
//! Placeholders `x1()`..`x9()` stand for the captured values of a match.
//! [`gref`] reads a shared cell at evaluation time, [`gcall`] wraps a unary
//! function call. Arithmetic uses the `%`, `+`, `-`, `*` operators; logic
//! uses `&`, `|` and `!`; comparisons are methods (`eq`, `lt`, ...).

use std::fmt;
use std::ops;
use std::sync::{Arc, RwLock};

use thiserror::Error;

use crate::atom::Atom;
use crate::message::{Element, IntoValue, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GuardError {
    #[error("placeholder x{index} used but only {captures} values were captured")]
    PlaceholderOutOfRange { index: usize, captures: usize },
    #[error("guard type error: {0}")]
    TypeMismatch(String),
    #[error("guard divides by zero")]
    DivisionByZero,
}

/// Intermediate value during guard evaluation.
#[derive(Clone, Debug)]
pub enum GuardValue {
    Bool(bool),
    Int(i64),
    Float(f64),
    Value(Value),
}

enum Num {
    I(i64),
    F(f64),
}

impl GuardValue {
    fn num(&self) -> Option<Num> {
        match self {
            GuardValue::Int(i) => Some(Num::I(*i)),
            GuardValue::Float(f) => Some(Num::F(*f)),
            GuardValue::Value(v) => v.as_i64().map(Num::I).or_else(|| v.as_f64().map(Num::F)),
            GuardValue::Bool(_) => None,
        }
    }

    fn boolean(&self) -> Option<bool> {
        match self {
            GuardValue::Bool(b) => Some(*b),
            GuardValue::Value(v) => v.as_bool(),
            _ => None,
        }
    }

    fn into_value(self) -> Value {
        match self {
            GuardValue::Bool(b) => b.into(),
            GuardValue::Int(i) => i.into(),
            GuardValue::Float(f) => f.into(),
            GuardValue::Value(v) => v,
        }
    }
}

/// Types usable as guard literals and as results of guard function calls.
pub trait IntoGuardValue {
    fn into_guard_value(self) -> GuardValue;
}

macro_rules! guard_int {
    ($($t:ty),*) => {$(
        impl IntoGuardValue for $t {
            fn into_guard_value(self) -> GuardValue {
                GuardValue::Int(self as i64)
            }
        }
    )*};
}
guard_int!(i32, i64, u32);

impl IntoGuardValue for u64 {
    fn into_guard_value(self) -> GuardValue {
        match i64::try_from(self) {
            Ok(i) => GuardValue::Int(i),
            Err(_) => GuardValue::Value(self.into()),
        }
    }
}

impl IntoGuardValue for f32 {
    fn into_guard_value(self) -> GuardValue {
        GuardValue::Float(self as f64)
    }
}

impl IntoGuardValue for f64 {
    fn into_guard_value(self) -> GuardValue {
        GuardValue::Float(self)
    }
}

impl IntoGuardValue for bool {
    fn into_guard_value(self) -> GuardValue {
        GuardValue::Bool(self)
    }
}

macro_rules! guard_value {
    ($($t:ty),*) => {$(
        impl IntoGuardValue for $t {
            fn into_guard_value(self) -> GuardValue {
                GuardValue::Value(self.into_value())
            }
        }
    )*};
}
guard_value!(&str, String, Atom, Value, Vec<i32>);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum BinOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
    Add,
    Sub,
    Mul,
    Rem,
}

type LazyFn = Arc<dyn Fn() -> GuardValue + Send + Sync>;
type CallFn = Arc<dyn Fn(GuardValue) -> Result<GuardValue, GuardError> + Send + Sync>;

#[derive(Clone)]
enum Node {
    Placeholder(usize),
    Literal(GuardValue),
    Lazy(LazyFn),
    Call(CallFn, Box<Node>),
    Not(Box<Node>),
    Binary(BinOp, Box<Node>, Box<Node>),
}

/// A guard expression tree.
#[derive(Clone)]
pub struct GuardExpr(Node);

pub type Guard = GuardExpr;

/// Placeholder for the `index`-th captured value (1-based).
pub fn x(index: usize) -> GuardExpr {
    assert!(index >= 1, "placeholders are 1-based");
    GuardExpr(Node::Placeholder(index))
}

macro_rules! placeholders {
    ($($name:ident => $i:expr),*) => {$(
        pub fn $name() -> GuardExpr {
            x($i)
        }
    )*};
}
placeholders!(x1 => 1, x2 => 2, x3 => 3, x4 => 4, x5 => 5, x6 => 6, x7 => 7, x8 => 8, x9 => 9);

/// Shared variable read lazily by guards built with [`gref`].
#[derive(Default)]
pub struct GuardCell<T>(Arc<RwLock<T>>);

impl<T> Clone for GuardCell<T> {
    fn clone(&self) -> Self {
        GuardCell(Arc::clone(&self.0))
    }
}

impl<T: Clone> GuardCell<T> {
    pub fn new(value: T) -> Self {
        GuardCell(Arc::new(RwLock::new(value)))
    }

    pub fn set(&self, value: T) {
        *self.0.write().unwrap() = value;
    }

    pub fn get(&self) -> T {
        self.0.read().unwrap().clone()
    }
}

/// Guard reference: reads `cell` when the guard is evaluated.
pub fn gref<T>(cell: &GuardCell<T>) -> GuardExpr
where
    T: IntoGuardValue + Clone + Send + Sync + 'static,
{
    let cell = cell.clone();
    GuardExpr::lazy(move || cell.get())
}

/// Guard function call on one argument.
pub fn gcall<T, R, F>(f: F, arg: GuardExpr) -> GuardExpr
where
    T: Element,
    R: IntoGuardValue,
    F: Fn(&T) -> R + Send + Sync + 'static,
{
    let call: CallFn = Arc::new(move |v: GuardValue| {
        let v = v.into_value();
        match v.downcast_ref::<T>() {
            Some(t) => Ok(f(t).into_guard_value()),
            None => Err(GuardError::TypeMismatch(format!(
                "gcall expects {}, got {}",
                std::any::type_name::<T>(),
                v
            ))),
        }
    });
    GuardExpr(Node::Call(call, Box::new(arg.0)))
}

impl GuardExpr {
    pub fn literal(v: impl IntoGuardValue) -> GuardExpr {
        GuardExpr(Node::Literal(v.into_guard_value()))
    }

    /// Evaluates `f` on every guard evaluation.
    pub fn lazy<V, F>(f: F) -> GuardExpr
    where
        V: IntoGuardValue,
        F: Fn() -> V + Send + Sync + 'static,
    {
        GuardExpr(Node::Lazy(Arc::new(move || f().into_guard_value())))
    }

    /// `x1().call(f)` is `gcall(f, x1())`.
    pub fn call<T, R, F>(self, f: F) -> GuardExpr
    where
        T: Element,
        R: IntoGuardValue,
        F: Fn(&T) -> R + Send + Sync + 'static,
    {
        gcall(f, self)
    }

    fn bin(self, op: BinOp, rhs: impl Into<GuardExpr>) -> GuardExpr {
        GuardExpr(Node::Binary(op, Box::new(self.0), Box::new(rhs.into().0)))
    }

    pub fn eq(self, rhs: impl Into<GuardExpr>) -> GuardExpr {
        self.bin(BinOp::Eq, rhs)
    }

    pub fn ne(self, rhs: impl Into<GuardExpr>) -> GuardExpr {
        self.bin(BinOp::Ne, rhs)
    }

    pub fn lt(self, rhs: impl Into<GuardExpr>) -> GuardExpr {
        self.bin(BinOp::Lt, rhs)
    }

    pub fn le(self, rhs: impl Into<GuardExpr>) -> GuardExpr {
        self.bin(BinOp::Le, rhs)
    }

    pub fn gt(self, rhs: impl Into<GuardExpr>) -> GuardExpr {
        self.bin(BinOp::Gt, rhs)
    }

    pub fn ge(self, rhs: impl Into<GuardExpr>) -> GuardExpr {
        self.bin(BinOp::Ge, rhs)
    }

    pub fn and(self, rhs: impl Into<GuardExpr>) -> GuardExpr {
        self.bin(BinOp::And, rhs)
    }

    pub fn or(self, rhs: impl Into<GuardExpr>) -> GuardExpr {
        self.bin(BinOp::Or, rhs)
    }

    /// Evaluates the guard as a predicate over `captures`.
    pub fn eval(&self, captures: &[Value]) -> Result<bool, GuardError> {
        let v = eval(&self.0, captures)?;
        v.boolean()
            .ok_or_else(|| GuardError::TypeMismatch(format!("guard yields non-boolean {v:?}")))
    }
}

fn eval(node: &Node, captures: &[Value]) -> Result<GuardValue, GuardError> {
    Ok(match node {
        Node::Placeholder(i) => match captures.get(i - 1) {
            Some(v) => GuardValue::Value(v.clone()),
            None => {
                return Err(GuardError::PlaceholderOutOfRange {
                    index: *i,
                    captures: captures.len(),
                })
            }
        },
        Node::Literal(v) => v.clone(),
        Node::Lazy(f) => f(),
        Node::Call(f, arg) => f(eval(arg, captures)?)?,
        Node::Not(inner) => {
            let v = eval(inner, captures)?;
            match v.boolean() {
                Some(b) => GuardValue::Bool(!b),
                None => return Err(GuardError::TypeMismatch(format!("`!` on {v:?}"))),
            }
        }
        Node::Binary(BinOp::And, l, r) => {
            GuardValue::Bool(truth(eval(l, captures)?)? && truth(eval(r, captures)?)?)
        }
        Node::Binary(BinOp::Or, l, r) => {
            GuardValue::Bool(truth(eval(l, captures)?)? || truth(eval(r, captures)?)?)
        }
        Node::Binary(op, l, r) => binary(*op, eval(l, captures)?, eval(r, captures)?)?,
    })
}

fn truth(v: GuardValue) -> Result<bool, GuardError> {
    v.boolean()
        .ok_or_else(|| GuardError::TypeMismatch(format!("expected boolean, got {v:?}")))
}

fn equal(l: &GuardValue, r: &GuardValue) -> bool {
    match (l.num(), r.num()) {
        (Some(Num::I(a)), Some(Num::I(b))) => a == b,
        (Some(a), Some(b)) => to_f64(a) == to_f64(b),
        _ => match (l.boolean(), r.boolean()) {
            (Some(a), Some(b)) => a == b,
            _ => l.clone().into_value() == r.clone().into_value(),
        },
    }
}

fn to_f64(n: Num) -> f64 {
    match n {
        Num::I(i) => i as f64,
        Num::F(f) => f,
    }
}

fn binary(op: BinOp, l: GuardValue, r: GuardValue) -> Result<GuardValue, GuardError> {
    use std::cmp::Ordering;
    match op {
        BinOp::Eq => return Ok(GuardValue::Bool(equal(&l, &r))),
        BinOp::Ne => return Ok(GuardValue::Bool(!equal(&l, &r))),
        _ => {}
    }
    let (a, b) = match (l.num(), r.num()) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            // strings order lexicographically; nothing else is ordered
            let (lv, rv) = (l.into_value(), r.into_value());
            if let (Some(a), Some(b)) = (lv.downcast_ref::<String>(), rv.downcast_ref::<String>()) {
                let ord = a.cmp(b);
                return compare(op, Some(ord)).map(GuardValue::Bool);
            }
            return Err(GuardError::TypeMismatch(format!("{op:?} on {lv} and {rv}")));
        }
    };
    match op {
        BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
            let ord: Option<Ordering> = match (&a, &b) {
                (Num::I(x), Num::I(y)) => Some(x.cmp(y)),
                _ => to_f64(a).partial_cmp(&to_f64(b)),
            };
            compare(op, ord).map(GuardValue::Bool)
        }
        BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Rem => arith(op, a, b),
        _ => unreachable!("handled above"),
    }
}

fn compare(op: BinOp, ord: Option<std::cmp::Ordering>) -> Result<bool, GuardError> {
    use std::cmp::Ordering::*;
    // NaN compares false everywhere
    let Some(ord) = ord else { return Ok(false) };
    Ok(match op {
        BinOp::Lt => ord == Less,
        BinOp::Le => ord != Greater,
        BinOp::Gt => ord == Greater,
        BinOp::Ge => ord != Less,
        _ => unreachable!("comparison operators only"),
    })
}

fn arith(op: BinOp, a: Num, b: Num) -> Result<GuardValue, GuardError> {
    if let (Num::I(x), Num::I(y)) = (&a, &b) {
        let (x, y) = (*x, *y);
        let r = match op {
            BinOp::Add => x.checked_add(y),
            BinOp::Sub => x.checked_sub(y),
            BinOp::Mul => x.checked_mul(y),
            BinOp::Rem if y == 0 => return Err(GuardError::DivisionByZero),
            BinOp::Rem => x.checked_rem(y),
            _ => unreachable!("arithmetic operators only"),
        };
        return r
            .map(GuardValue::Int)
            .ok_or_else(|| GuardError::TypeMismatch(format!("integer overflow in {op:?}")));
    }
    let (x, y) = (to_f64(a), to_f64(b));
    Ok(GuardValue::Float(match op {
        BinOp::Add => x + y,
        BinOp::Sub => x - y,
        BinOp::Mul => x * y,
        BinOp::Rem => x % y,
        _ => unreachable!("arithmetic operators only"),
    }))
}

impl<T: IntoGuardValue> From<T> for GuardExpr {
    fn from(v: T) -> GuardExpr {
        GuardExpr::literal(v)
    }
}

macro_rules! guard_op {
    ($($tr:ident $method:ident => $op:ident),*) => {$(
        impl<R: Into<GuardExpr>> ops::$tr<R> for GuardExpr {
            type Output = GuardExpr;

            fn $method(self, rhs: R) -> GuardExpr {
                self.bin(BinOp::$op, rhs)
            }
        }
    )*};
}
guard_op!(Add add => Add, Sub sub => Sub, Mul mul => Mul, Rem rem => Rem, BitAnd bitand => And, BitOr bitor => Or);

impl ops::Not for GuardExpr {
    type Output = GuardExpr;

    fn not(self) -> GuardExpr {
        GuardExpr(Node::Not(Box::new(self.0)))
    }
}

impl fmt::Debug for GuardExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(n: &Node, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match n {
                Node::Placeholder(i) => write!(f, "x{i}"),
                Node::Literal(v) => write!(f, "{v:?}"),
                Node::Lazy(_) => f.write_str("<lazy>"),
                Node::Call(_, a) => {
                    f.write_str("call(")?;
                    go(a, f)?;
                    f.write_str(")")
                }
                Node::Not(a) => {
                    f.write_str("!")?;
                    go(a, f)
                }
                Node::Binary(op, l, r) => {
                    f.write_str("(")?;
                    go(l, f)?;
                    write!(f, " {op:?} ")?;
                    go(r, f)?;
                    f.write_str(")")
                }
            }
        }
        go(&self.0, f)
    }
}
