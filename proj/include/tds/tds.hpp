#pragma once

#include "tds/errors.hpp"
#include "tds/fock.hpp"
#include "tds/oracle.hpp"
#include "tds/params.hpp"
#include "tds/quasiprob.hpp"
#include "tds/scan.hpp"
#include "tds/witnesses.hpp"
