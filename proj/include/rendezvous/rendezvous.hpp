#pragma once

#include "rendezvous/channel.hpp"
#include "rendezvous/env_model.hpp"
#include "rendezvous/experiments.hpp"
#include "rendezvous/oracle.hpp"
#include "rendezvous/sim_engine.hpp"
#include "rendezvous/strategies.hpp"
#include "rendezvous/theory.hpp"
