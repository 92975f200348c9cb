pub mod bigutil;
pub mod contfrac;
