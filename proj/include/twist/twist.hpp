#pragma once

#include "twist/core.hpp"
#include "twist/genfn.hpp"
#include "twist/chain.hpp"
#include "twist/action.hpp"
#include "twist/minimize.hpp"
#include "twist/transition.hpp"
