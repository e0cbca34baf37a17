#pragma once

#include "ppcert/certifier.hpp"
#include "ppcert/errors.hpp"
#include "ppcert/grouptab.hpp"
#include "ppcert/harness.hpp"
#include "ppcert/modarith.hpp"
#include "ppcert/oracle.hpp"
#include "ppcert/orbitcalc.hpp"
#include "ppcert/primitive.hpp"
