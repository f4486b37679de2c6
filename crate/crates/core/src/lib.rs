// SPDX-License-Identifier: Apache-2.0

//! Gate-level modelling, simulation and timing checks for dual-rail
//! asynchronous ripple-carry adders.

pub mod adder;
pub mod gate;
pub mod netlist;
pub mod sim;
pub mod time;
pub mod timing;
pub mod verify;
