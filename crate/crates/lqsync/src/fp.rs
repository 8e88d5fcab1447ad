//! Scalar float routines, dispatching to `std` intrinsics or `libm`.
//!
//! The crate is `no_std`-compatible; every transcendental call goes through
//! this shim so the rest of the code base has a single float path.

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("lqsync requires either the `std` or the `libm` feature");

macro_rules! unary {
    ($name:ident) => {
        #[inline]
        pub fn $name(x: f64) -> f64 {
            #[cfg(feature = "std")]
            {
                x.$name()
            }
            #[cfg(all(not(feature = "std"), feature = "libm"))]
            {
                libm::$name(x)
            }
        }
    };
}

unary!(sqrt);
unary!(sin);
unary!(cos);
unary!(exp);
unary!(floor);
unary!(round);

#[inline]
pub fn abs(x: f64) -> f64 {
    f64::from_bits(x.to_bits() & !(1u64 << 63))
}

#[inline]
pub fn hypot(x: f64, y: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        x.hypot(y)
    }
    #[cfg(all(not(feature = "std"), feature = "libm"))]
    {
        libm::hypot(x, y)
    }
}

/// Integer power by repeated squaring; exponents here are small.
pub fn powi(x: f64, n: i32) -> f64 {
    let mut base = if n < 0 { 1.0 / x } else { x };
    let mut e = n.unsigned_abs();
    let mut acc = 1.0;
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}

/// `abs(a)` with the sign of `b` (Fortran SIGN semantics, sign(0) = +).
#[inline]
pub fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        abs(a)
    } else {
        -abs(a)
    }
}
