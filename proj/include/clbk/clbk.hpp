// clbk :: everything

#ifndef CLBK_CLBK_HPP_
#define CLBK_CLBK_HPP_

#include "formula.hpp"
#include "syntax.hpp"
#include "classical.hpp"
#include "prover.hpp"
#include "engine.hpp"
#include "games.hpp"
#include "agents.hpp"
#include "scenario.hpp"

#endif // CLBK_CLBK_HPP_
