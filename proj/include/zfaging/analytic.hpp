#pragma once

#include "asymptotic.hpp"
#include "jfunc.hpp"
#include "model.hpp"
#include "outage.hpp"
#include "rate.hpp"
