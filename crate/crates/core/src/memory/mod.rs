//! Attribute schema, the STM bus, value codes and STM persistence.

mod bus;
pub mod codes;
mod schema;
mod stm;

pub use bus::Bus;
pub use codes::{Action, Operator, ACTION_FIELD};
pub use schema::{
    AttributeSchema, FieldDescriptor, FieldId, FieldKind, FieldValues, Nibble, FIELD_WIDTH,
};
pub use stm::StmWord;
