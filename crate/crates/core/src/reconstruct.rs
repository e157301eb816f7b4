//! Non-interactive reconstruction of refresh views.
//!
//! Given old shares `(L, R)`, new shares `(L', R')` with the same inner
//! product, and common randomness `(V, V~)` sampled offline, each party
//! rebuilds the view it would have had in a refresh that output `(L', R')`:
//!
//! - left: `A_i = V_i L_i`, `X~ = L' - L`, `A~_i = V~_i^{-1} X~_i`
//! - right: `X = R' - R`, `B_i = V_i^{-1} X_i`, `B~_i = V~_i R'_i`
//!
//! The two halves only read their own party's shares, so no messages are
//! exchanged.

use rand::Rng;

use crate::encoding::Encoding;
use crate::error::{Error, Result};
use crate::field::{counter, FieldParams, NonZeroVector};
use crate::oracle;
use crate::refresh::{ViewL, ViewR};

/// Offline randomness shared by both parties.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CommonRandomness {
    pub v: NonZeroVector,
    pub v_tilde: NonZeroVector,
}

impl CommonRandomness {
    pub fn sample<R: Rng + ?Sized>(params: FieldParams, rng: &mut R) -> Self {
        CommonRandomness {
            v: params.sample_nonzero_vector(rng),
            v_tilde: params.sample_nonzero_vector(rng),
        }
    }

    /// Reads `(V, V~)` out of a refresh view, e.g. to replay a trace.
    pub fn from_view(view: &ViewL) -> Result<Self> {
        Ok(CommonRandomness {
            v: NonZeroVector::try_from(view.v.clone())?,
            v_tilde: NonZeroVector::try_from(view.v_tilde.clone())?,
        })
    }
}

/// The left party's half; sees only `L`, `L'` and the common randomness.
pub fn reconstruct_left(
    l: &NonZeroVector,
    l_prime: &NonZeroVector,
    cr: &CommonRandomness,
) -> Result<ViewL> {
    let a = NonZeroVector::try_from(cr.v.hadamard(l)?)?;
    let x_tilde = l_prime.sub(l)?;
    let a_tilde = cr.v_tilde.inverses()?.hadamard(&x_tilde)?;
    Ok(ViewL {
        l: l.clone(),
        a,
        v: cr.v.as_vector().clone(),
        a_tilde,
        v_tilde: cr.v_tilde.as_vector().clone(),
    })
}

/// The right party's half; sees only `R`, `R'` and the common randomness.
pub fn reconstruct_right(
    r: &NonZeroVector,
    r_prime: &NonZeroVector,
    cr: &CommonRandomness,
) -> Result<ViewR> {
    let x = r_prime.sub(r)?;
    let b = cr.v.inverses()?.hadamard(&x)?;
    let b_tilde = NonZeroVector::try_from(cr.v_tilde.hadamard(r_prime)?)?;
    Ok(ViewR {
        r: r.clone(),
        b,
        v: cr.v.as_vector().clone(),
        b_tilde,
        v_tilde: cr.v_tilde.as_vector().clone(),
    })
}

/// Rebuilds both views. Fails if the two encodings carry different secrets.
pub fn reconstruct(
    old: &Encoding,
    new: &Encoding,
    cr: &CommonRandomness,
) -> Result<(ViewL, ViewR)> {
    if old.params() != new.params() {
        return Err(Error::ParamsMismatch(format!(
            "old encoding {} vs new encoding {}",
            old.params(),
            new.params()
        )));
    }
    let (s_old, s_new) = counter::uncounted(|| (old.decode(), new.decode()));
    if s_old != s_new {
        return Err(Error::Precondition(format!(
            "<L,R> = {s_old} differs from <L',R'> = {s_new}"
        )));
    }
    reconstruct_unchecked(old, new, cr)
}

/// [`reconstruct`] without the equal-secret check. The resulting views are
/// meaningless when the secrets differ; exposed so the constraint checker
/// can be exercised on such inputs.
pub fn reconstruct_unchecked(
    old: &Encoding,
    new: &Encoding,
    cr: &CommonRandomness,
) -> Result<(ViewL, ViewR)> {
    let params = old.params();
    params.check_vector(&cr.v)?;
    params.check_vector(&cr.v_tilde)?;
    let view_l = reconstruct_left(old.left(), new.left(), cr)?;
    let view_r = reconstruct_right(old.right(), new.right(), cr)?;
    Ok((view_l, view_r))
}

/// True iff the implied `(A, A~, B, B~)` is a valid oracle sample and the
/// views agree on the exchanged vectors.
pub fn check_reconstruction_constraints(view_l: &ViewL, view_r: &ViewR) -> bool {
    view_l.v == view_r.v
        && view_l.v_tilde == view_r.v_tilde
        && oracle::verify_parts(&view_l.a, &view_l.a_tilde, &view_r.b, &view_r.b_tilde)
}
