#pragma once

#include "qptrace/continuation.hpp"
#include "qptrace/crossing.hpp"
#include "qptrace/errors.hpp"
#include "qptrace/oracle.hpp"
#include "qptrace/polynomial.hpp"
#include "qptrace/problem.hpp"
#include "qptrace/quasipolynomial.hpp"
#include "qptrace/run.hpp"
#include "qptrace/serialize.hpp"
#include "qptrace/tracker.hpp"
