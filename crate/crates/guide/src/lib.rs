//! Book chapters compiled as doc-tests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/risk_kernel.md")]
pub mod risk_kernel {}

#[doc = include_str!("../../../book/src/higher_order.md")]
pub mod higher_order {}

#[doc = include_str!("../../../book/src/aggregation.md")]
pub mod aggregation {}

#[doc = include_str!("../../../book/src/costs.md")]
pub mod costs {}

#[doc = include_str!("../../../book/src/inequality.md")]
pub mod inequality {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
