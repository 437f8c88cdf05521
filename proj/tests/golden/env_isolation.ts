# The same receiver answers differently per environment.
env ruby
send "A" * 3
expect "AAA"
env smalltalk
send "A" * 3
expect_error NoMethodError
# A ruby-only mixin never leaks into the smalltalk chain.
env ruby
module Pad
def Pad pad vis public sig 0 body (send (self) * 2)
include String Pad
send "AB" pad
expect "ABAB"
env smalltalk
send "AB" pad
expect_error NoMethodError
inspect hierarchy String
